//! MPS export for cross-checking with external solvers.

use std::io::{self, Write};

use super::{LpProblem, Sense};

const OBJ_ROW: &str = "COST";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpsStyle {
    /// Whitespace separated, semantic row/column names.
    Free,
    /// Column-positioned fields with generated 8-character names
    /// (`R0000001`, `C0000001`, ...).
    Fixed,
}

/// Writes `p` in MPS format (sections NAME, ROWS, COLUMNS, RHS, BOUNDS,
/// ENDATA). The objective row is called `COST`.
pub fn write_mps<W: Write>(p: &LpProblem, name: &str, style: MpsStyle, mut w: W) -> io::Result<()> {
    let row_name = |i: usize| match style {
        MpsStyle::Free => sanitize(p.names().row_name(i)),
        MpsStyle::Fixed => format!("R{:07}", i + 1),
    };
    let col_name = |j: usize| match style {
        MpsStyle::Free => sanitize(p.names().col_name(j)),
        MpsStyle::Fixed => format!("C{:07}", j + 1),
    };
    let num = |v: f64| match style {
        MpsStyle::Free => format!("{v}"),
        MpsStyle::Fixed => fixed_number(v),
    };
    let line = |w: &mut W, f: &[&str]| -> io::Result<()> {
        match style {
            MpsStyle::Free => writeln!(w, " {}", f.join(" ")),
            MpsStyle::Fixed => writeln!(w, "{}", fixed_line(f)),
        }
    };

    writeln!(w, "NAME          {name}")?;
    writeln!(w, "ROWS")?;
    line(&mut w, &["N", OBJ_ROW])?;
    for (i, row) in p.rows().iter().enumerate() {
        let s = match row.sense {
            Sense::Le => "L",
            Sense::Eq => "E",
            Sense::Ge => "G",
        };
        line(&mut w, &[s, &row_name(i)])?;
    }

    // Column-major view of the rows.
    let n = p.n_vars();
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, row) in p.rows().iter().enumerate() {
        for &(j, a) in &row.coeffs {
            cols[j].push((i, a));
        }
    }
    writeln!(w, "COLUMNS")?;
    for (j, entries) in cols.iter().enumerate() {
        let cname = col_name(j);
        let c = p.objective()[j];
        if c != 0.0 || entries.is_empty() {
            line(&mut w, &["", &cname, OBJ_ROW, &num(c)])?;
        }
        for &(i, a) in entries {
            line(&mut w, &["", &cname, &row_name(i), &num(a)])?;
        }
    }

    writeln!(w, "RHS")?;
    for (i, row) in p.rows().iter().enumerate() {
        if row.rhs != 0.0 {
            line(&mut w, &["", "RHS", &row_name(i), &num(row.rhs)])?;
        }
    }

    writeln!(w, "BOUNDS")?;
    for j in 0..n {
        let (l, u) = (p.lower()[j], p.upper()[j]);
        let cname = col_name(j);
        if l == u {
            line(&mut w, &["FX", "BND", &cname, &num(l)])?;
            continue;
        }
        match (l.is_finite(), u.is_finite()) {
            (false, false) => line(&mut w, &["FR", "BND", &cname])?,
            (false, true) => {
                line(&mut w, &["MI", "BND", &cname])?;
                line(&mut w, &["UP", "BND", &cname, &num(u)])?;
            }
            (true, _) => {
                if l != 0.0 {
                    line(&mut w, &["LO", "BND", &cname, &num(l)])?;
                }
                if u.is_finite() {
                    line(&mut w, &["UP", "BND", &cname, &num(u)])?;
                }
            }
        }
    }
    writeln!(w, "ENDATA")
}

/// Convenience wrapper returning the MPS text.
pub fn to_mps_string(p: &LpProblem, name: &str, style: MpsStyle) -> String {
    let mut buf = Vec::new();
    write_mps(p, name, style, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("MPS output is ASCII")
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect()
}

/// Fixed-format record: fields start at columns 2, 5, 15, 25 (1-based).
fn fixed_line(f: &[&str]) -> String {
    const STARTS: [usize; 4] = [1, 4, 14, 24];
    let mut s = String::new();
    for (k, field) in f.iter().enumerate() {
        while s.len() < STARTS[k] {
            s.push(' ');
        }
        s.push_str(field);
    }
    s.trim_end().to_string()
}

/// Shortest representation of `v` that fits the 12-character number field.
fn fixed_number(v: f64) -> String {
    let plain = format!("{v}");
    if plain.len() <= 12 {
        return plain;
    }
    for prec in (0..=11).rev() {
        let s = format!("{v:.prec$e}");
        if s.len() <= 12 {
            return s;
        }
    }
    format!("{v:.0e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp() -> LpProblem {
        let mut lp = LpProblem::new();
        let x = lp.add_var("gen coal", 2.5);
        let y = lp.add_bounded_var("y", 0.0, -1.0, 4.0);
        let z = lp.add_bounded_var("z", 1.0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_row("bal", [(x, 1.0), (y, -1.0)], Sense::Eq, 10.0);
        lp.add_row("cap", [(x, 1.0), (z, 1.0)], Sense::Le, 0.0);
        lp
    }

    #[test]
    fn free_format_sections_in_order() {
        let text = to_mps_string(&lp(), "t", MpsStyle::Free);
        let heads: Vec<&str> = text
            .lines()
            .filter(|l| !l.starts_with(' '))
            .map(|l| l.split_whitespace().next().unwrap())
            .collect();
        assert_eq!(heads, ["NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"]);
        assert!(text.contains(" gen_coal COST 2.5"));
        assert!(text.contains(" RHS bal 10"));
        assert!(text.contains(" LO BND y -1"));
        assert!(text.contains(" FR BND z"));
    }

    #[test]
    fn fixed_format_field_positions() {
        let text = to_mps_string(&lp(), "t", MpsStyle::Fixed);
        let line = text
            .lines()
            .find(|l| l.contains("C0000001") && l.contains("R0000001"))
            .unwrap();
        assert_eq!(&line[4..12], "C0000001");
        assert_eq!(&line[14..22], "R0000001");
        assert_eq!(&line[24..], "1");
        assert_eq!(fixed_number(1.0 / 3.0).len(), 12);
    }
}
