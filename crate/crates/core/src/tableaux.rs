//! Double Butcher tableaux for IMEX Runge-Kutta schemes: registry,
//! classification and a plain-text loader so new schemes can be added
//! without recompiling.
//!
//! The explicit matrix is strictly lower triangular, the implicit matrix is
//! lower triangular (DIRK). A tableau is *type A* when the implicit matrix is
//! invertible, *type CK* when its first row vanishes and the trailing block
//! is invertible, and *globally stiffly accurate* (GSA) when each last row
//! equals the matching weight vector, so the final update coincides with the
//! last stage.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableauClass {
    TypeA,
    TypeCk,
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleButcherTableau<T> {
    pub name: String,
    /// Stage count.
    pub s: usize,
    /// Explicit matrix, strictly lower triangular.
    pub a_ex: Vec<Vec<T>>,
    /// Implicit matrix, lower triangular (DIRK).
    pub a_im: Vec<Vec<T>>,
    pub w_ex: Vec<T>,
    pub w_im: Vec<T>,
    pub c_ex: Vec<T>,
    pub c_im: Vec<T>,
}

/// Names of the tableaux compiled into the crate.
pub const BUILTIN_NAMES: [&str; 4] = ["DP1A242", "DP2A242", "ARS222", "FirstOrder"];

impl<T: Scalar> DoubleButcherTableau<T> {
    pub fn validate(&self) -> Result<()> {
        let s = self.s;
        let shape_ok = self.a_ex.len() == s
            && self.a_im.len() == s
            && self.a_ex.iter().all(|r| r.len() == s)
            && self.a_im.iter().all(|r| r.len() == s)
            && self.w_ex.len() == s
            && self.w_im.len() == s
            && self.c_ex.len() == s
            && self.c_im.len() == s;
        if !shape_ok || s == 0 {
            return Err(Error::InvalidTableau(format!(
                "'{}': inconsistent shapes for s = {s}",
                self.name
            )));
        }
        for i in 0..s {
            for j in 0..s {
                if j >= i && self.a_ex[i][j] != T::zero() {
                    return Err(Error::InvalidTableau(format!(
                        "'{}': explicit matrix must be strictly lower triangular (entry {i},{j})",
                        self.name
                    )));
                }
                if j > i && self.a_im[i][j] != T::zero() {
                    return Err(Error::InvalidTableau(format!(
                        "'{}': implicit matrix must be lower triangular (entry {i},{j})",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Type-A / type-CK / other classification of the implicit matrix.
    pub fn classify(&self) -> TableauClass {
        let diag_nonzero = |from: usize| (from..self.s).all(|i| self.a_im[i][i] != T::zero());
        if diag_nonzero(0) {
            return TableauClass::TypeA;
        }
        let first_row_zero = self.a_im[0].iter().all(|&x| x == T::zero());
        if self.s >= 2 && first_row_zero && diag_nonzero(1) {
            return TableauClass::TypeCk;
        }
        TableauClass::Other
    }

    /// Globally stiffly accurate: last rows equal the weight vectors.
    pub fn is_gsa(&self) -> bool {
        let last = self.s - 1;
        self.a_ex[last] == self.w_ex && self.a_im[last] == self.w_im
    }

    /// Row-sum consistency defect `max_i |sum_j a[i][j] - c[i]|` over both
    /// tableaux.
    pub fn row_sum_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.s {
            let se = self.a_ex[i].iter().fold(T::zero(), |acc, &x| acc + x);
            let si = self.a_im[i].iter().fold(T::zero(), |acc, &x| acc + x);
            worst = worst.max((se - self.c_ex[i]).abs());
            worst = worst.max((si - self.c_im[i]).abs());
        }
        worst
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let t = match name.to_ascii_lowercase().as_str() {
            "dp1a242" => Self::dp1a242(),
            "dp2a242" => Self::dp2a242(),
            "ars222" => Self::ars222(),
            "firstorder" | "first-order" => Self::first_order(),
            _ => return Err(Error::UnknownTableau(name.to_string())),
        };
        t.validate()?;
        Ok(t)
    }

    /// DP1-A(2,4,2): four-stage, second-order, type-A pair.
    pub fn dp1a242() -> Self {
        let z = T::zero();
        let h = T::of(0.5);
        let third = T::one() / T::of(3.0);
        let sixth = T::one() / T::of(6.0);
        let th = T::of(1.5);
        DoubleButcherTableau {
            name: "DP1A242".into(),
            s: 4,
            a_ex: vec![
                vec![z, z, z, z],
                vec![third, z, z, z],
                vec![T::one(), z, z, z],
                vec![h, z, h, z],
            ],
            a_im: vec![
                vec![h, z, z, z],
                vec![sixth, h, z, z],
                vec![-h, h, h, z],
                vec![th, -th, h, h],
            ],
            w_ex: vec![h, z, h, z],
            w_im: vec![th, -th, h, h],
            c_ex: vec![z, third, T::one(), T::one()],
            c_im: vec![h, T::of(2.0) / T::of(3.0), h, T::one()],
        }
    }

    /// DP2-A(2,4,2) with the default diagonal `gamma = 1 - sqrt(2)/2`.
    pub fn dp2a242() -> Self {
        Self::dp2a242_with_gamma(T::one() - T::SQRT_2() / T::of(2.0))
    }

    /// DP2-A(2,4,2): four-stage, second-order, type-A pair. Second order
    /// holds for any diagonal value `gamma`.
    pub fn dp2a242_with_gamma(g: T) -> Self {
        let z = T::zero();
        let h = T::of(0.5);
        let one = T::one();
        DoubleButcherTableau {
            name: "DP2A242".into(),
            s: 4,
            a_ex: vec![
                vec![z, z, z, z],
                vec![z, z, z, z],
                vec![z, one, z, z],
                vec![z, h, h, z],
            ],
            a_im: vec![
                vec![g, z, z, z],
                vec![-g, g, z, z],
                vec![z, one - g, g, z],
                vec![z, h, h - g, g],
            ],
            w_ex: vec![z, h, h, z],
            w_im: vec![z, h, h - g, g],
            c_ex: vec![z, z, one, one],
            c_im: vec![g, z, one, one],
        }
    }

    /// ARS(2,2,2): three-stage, second-order, type-CK pair with
    /// `gamma = 1 - sqrt(2)/2`, `sigma = 1/(2 gamma)`, `delta = 1 - sigma`.
    pub fn ars222() -> Self {
        let z = T::zero();
        let one = T::one();
        let g = one - T::SQRT_2() / T::of(2.0);
        let sigma = one / (T::of(2.0) * g);
        let d = one - sigma;
        DoubleButcherTableau {
            name: "ARS222".into(),
            s: 3,
            a_ex: vec![vec![z, z, z], vec![g, z, z], vec![d, one - d, z]],
            a_im: vec![vec![z, z, z], vec![z, g, z], vec![z, one - g, g]],
            w_ex: vec![d, one - d, z],
            w_im: vec![z, one - g, g],
            c_ex: vec![z, g, one],
            c_im: vec![z, g, one],
        }
    }

    /// The first-order IMEX pair in double-tableau form: stage one passes
    /// the old state through, stage two treats the explicit part at the old
    /// state and the implicit part at the new one. One step with it is the
    /// first-order penalized update.
    pub fn first_order() -> Self {
        let z = T::zero();
        let one = T::one();
        DoubleButcherTableau {
            name: "FirstOrder".into(),
            s: 2,
            a_ex: vec![vec![z, z], vec![one, z]],
            a_im: vec![vec![z, z], vec![z, one]],
            w_ex: vec![one, z],
            w_im: vec![z, one],
            c_ex: vec![z, one],
            c_im: vec![z, one],
        }
    }

    /// Parse a tableau from plain structured text.
    ///
    /// Format: `name <id>` and `s <stages>` lines, then blocks introduced by
    /// `a_ex` / `a_im` (one whitespace-separated row per line) and single
    /// lines `w_ex`, `w_im`, `c_ex`, `c_im` followed by their entries.
    /// `#` starts a comment. Entries may be decimals or fractions like `1/3`.
    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidTableau(m.to_string());
        let mut name = String::from("custom");
        let mut s = 0usize;
        let mut a_ex: Option<Vec<Vec<T>>> = None;
        let mut a_im: Option<Vec<Vec<T>>> = None;
        let mut w_ex = None;
        let mut w_im = None;
        let mut c_ex = None;
        let mut c_im = None;

        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .peekable();

        while let Some(line) = lines.next() {
            let mut words = line.split_whitespace();
            let key = words.next().ok_or_else(|| bad("empty line"))?;
            match key {
                "name" => {
                    name = words.next().ok_or_else(|| bad("missing name"))?.to_string();
                }
                "s" => {
                    s = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| bad("bad stage count"))?;
                }
                "a_ex" | "a_im" => {
                    if s == 0 {
                        return Err(bad("stage count must come before matrices"));
                    }
                    let mut rows = Vec::with_capacity(s);
                    for _ in 0..s {
                        let row_line = lines.next().ok_or_else(|| bad("missing matrix row"))?;
                        rows.push(parse_row::<T>(row_line, s)?);
                    }
                    if key == "a_ex" {
                        a_ex = Some(rows);
                    } else {
                        a_im = Some(rows);
                    }
                }
                "w_ex" | "w_im" | "c_ex" | "c_im" => {
                    let rest: Vec<&str> = words.collect();
                    let row = parse_row::<T>(&rest.join(" "), s)?;
                    match key {
                        "w_ex" => w_ex = Some(row),
                        "w_im" => w_im = Some(row),
                        "c_ex" => c_ex = Some(row),
                        _ => c_im = Some(row),
                    }
                }
                other => return Err(bad(&format!("unknown key '{other}'"))),
            }
        }

        let t = DoubleButcherTableau {
            name,
            s,
            a_ex: a_ex.ok_or_else(|| bad("missing a_ex"))?,
            a_im: a_im.ok_or_else(|| bad("missing a_im"))?,
            w_ex: w_ex.ok_or_else(|| bad("missing w_ex"))?,
            w_im: w_im.ok_or_else(|| bad("missing w_im"))?,
            c_ex: c_ex.ok_or_else(|| bad("missing c_ex"))?,
            c_im: c_im.ok_or_else(|| bad("missing c_im"))?,
        };
        t.validate()?;
        Ok(t)
    }
}

fn parse_row<T: Scalar>(line: &str, s: usize) -> Result<Vec<T>> {
    let row: Vec<T> = line
        .split_whitespace()
        .map(parse_number::<T>)
        .collect::<Result<_>>()?;
    if row.len() != s {
        return Err(Error::InvalidTableau(format!(
            "expected {s} entries, got {} in '{line}'",
            row.len()
        )));
    }
    Ok(row)
}

fn parse_number<T: Scalar>(word: &str) -> Result<T> {
    let err = || Error::InvalidTableau(format!("bad number '{word}'"));
    if let Some((num, den)) = word.split_once('/') {
        let n: f64 = num.trim().parse().map_err(|_| err())?;
        let d: f64 = den.trim().parse().map_err(|_| err())?;
        if d == 0.0 {
            return Err(err());
        }
        Ok(T::of(n / d))
    } else {
        word.parse::<f64>().map(T::of).map_err(|_| err())
    }
}
