//! CPLEX LP-format writer.

use std::io::{self, Write};

use super::{LpProblem, Sense};

/// Writes `problem` in CPLEX LP format. Column and row names come from the
/// supplied closures and must be valid LP identifiers (letters, digits and
/// `_.[]` are safe).
pub fn write_lp_format<W: Write>(
    problem: &LpProblem,
    out: &mut W,
    col_name: impl Fn(usize) -> String,
    row_name: impl Fn(usize) -> String,
) -> io::Result<()> {
    writeln!(out, "\\ {} columns, {} rows", problem.n_cols(), problem.n_rows())?;
    writeln!(out, "Maximize")?;
    let mut line = Line::new(" obj:");
    for (j, &c) in problem.objective.iter().enumerate() {
        if c != 0.0 {
            line.term(out, c, &col_name(j))?;
        }
    }
    if line.empty {
        line.push(out, &format!(" 0 {}", col_name(0)))?;
    }
    line.finish(out, "")?;

    let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); problem.n_rows()];
    for &(r, c, a) in &problem.entries {
        by_row[r].push((c, a));
    }
    writeln!(out, "Subject To")?;
    for (i, (row, terms)) in problem.rows.iter().zip(&by_row).enumerate() {
        if row.rhs.is_infinite() {
            continue;
        }
        let mut line = Line::new(&format!(" {}:", row_name(i)));
        if terms.is_empty() {
            line.push(out, &format!(" 0 {}", col_name(0)))?;
        }
        for &(c, a) in terms {
            line.term(out, a, &col_name(c))?;
        }
        let op = match row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        line.finish(out, &format!(" {op} {}", fmt(row.rhs)))?;
    }

    writeln!(out, "Bounds")?;
    for j in 0..problem.n_cols() {
        let (l, u) = (problem.lower[j], problem.upper[j]);
        let name = col_name(j);
        if l == u {
            writeln!(out, " {name} = {}", fmt(l))?;
        } else if l == f64::NEG_INFINITY && u == f64::INFINITY {
            writeln!(out, " {name} free")?;
        } else if l == 0.0 && u == f64::INFINITY {
            // Default bounds.
        } else {
            let lo = if l == f64::NEG_INFINITY { "-inf".to_owned() } else { fmt(l) };
            let hi = if u == f64::INFINITY { "+inf".to_owned() } else { fmt(u) };
            writeln!(out, " {lo} <= {name} <= {hi}")?;
        }
    }
    writeln!(out, "End")
}

/// Longest line emitted before wrapping; LP readers commonly cap lines at 255
/// or 510 characters.
const MAX_LINE: usize = 200;

/// Accumulates an expression, wrapping onto continuation lines as needed.
struct Line {
    buf: String,
    empty: bool,
}

impl Line {
    fn new(head: &str) -> Self {
        Self {
            buf: head.to_owned(),
            empty: true,
        }
    }

    fn push<W: Write>(&mut self, out: &mut W, piece: &str) -> io::Result<()> {
        if self.buf.len() + piece.len() > MAX_LINE {
            writeln!(out, "{}", self.buf)?;
            self.buf.clear();
            self.buf.push(' ');
        }
        self.buf.push_str(piece);
        self.empty = false;
        Ok(())
    }

    fn term<W: Write>(&mut self, out: &mut W, coeff: f64, name: &str) -> io::Result<()> {
        let piece = if coeff < 0.0 {
            format!(" - {} {name}", fmt(-coeff))
        } else {
            format!(" + {} {name}", fmt(coeff))
        };
        self.push(out, &piece)
    }

    fn finish<W: Write>(mut self, out: &mut W, tail: &str) -> io::Result<()> {
        if !tail.is_empty() {
            self.push(out, tail)?;
        }
        writeln!(out, "{}", self.buf)
    }
}

fn fmt(v: f64) -> String {
    // `{:?}` round-trips f64 exactly.
    format!("{v:?}")
}
