//! Plain-text tables. Numbers are shown to 6 significant digits; the JSON
//! report keeps full precision.

use ovfree_core::{Matrix, C64};

/// Magnitudes below this print as 0.
const SNAP: f64 = 5e-13;

/// `x` to 6 significant digits, `%g` style; tiny values print as 0.
pub fn sig(x: f64) -> String {
    if x.abs() < SNAP {
        return "0".into();
    }
    error(x)
}

/// Like [`sig`] without snapping, for errors and residuals.
pub fn error(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if !(-5..6).contains(&e) {
        let s = format!("{x:.5e}");
        let (mant, exp) = s.split_once('e').expect("exponent");
        return format!("{}e{exp}", trim(mant));
    }
    let s = format!("{:.*}", (5 - e).max(0) as usize, x);
    trim(&s).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `a+bi`.
pub fn complex(z: C64) -> String {
    let im = if z.im.abs() < SNAP { 0.0 } else { z.im };
    let sign = if im < 0.0 { '-' } else { '+' };
    format!("{}{sign}{}i", sig(z.re), sig(im.abs()))
}

/// Scalars bare, larger matrices as `[a, b; c, d]`.
pub fn matrix(m: &Matrix) -> String {
    let d = m.dim();
    if d == 1 {
        return complex(*m.get(0, 0));
    }
    let rows: Vec<String> =
        (0..d).map(|i| (0..d).map(|j| complex(*m.get(i, j))).collect::<Vec<_>>().join(", ")).collect();
    format!("[{}]", rows.join("; "))
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) {
        self.rows.push(cells.into_iter().map(Into::into).collect());
    }

    pub fn render(&self) -> String {
        let cols = self.header.len();
        let mut width = vec![0; cols];
        for r in std::iter::once(&self.header).chain(&self.rows) {
            for (i, cell) in r.iter().enumerate().take(cols) {
                width[i] = width[i].max(cell.chars().count());
            }
        }
        let mut out = String::new();
        for r in std::iter::once(&self.header).chain(&self.rows) {
            let mut line = String::new();
            for (i, cell) in r.iter().enumerate().take(cols) {
                if i > 0 {
                    line.push_str("  ");
                }
                line.push_str(cell);
                line.extend(std::iter::repeat(' ').take(width[i] - cell.chars().count()));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}
