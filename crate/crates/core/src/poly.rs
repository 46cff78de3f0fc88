//! Multivariate polynomials used as reservoir readouts.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real polynomial in `nvars` variables, stored as a map from exponent
/// multi-index to coefficient. Terms with a zero coefficient are dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolynomialDoc", into = "PolynomialDoc")]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The monomial `x_i`.
    pub fn variable(nvars: usize, i: usize) -> Result<Self> {
        let mut e = vec![0; nvars];
        *e.get_mut(i).ok_or_else(|| {
            Error::Dimension(format!("variable {i} of a polynomial in {nvars} variables"))
        })? = 1;
        Ok(Self::monomial(e, 1.0))
    }

    pub fn monomial(exponents: Vec<u32>, coeff: f64) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, coeff);
        p
    }

    /// `Σ_i w_i x_i`.
    pub fn linear(weights: &[f64]) -> Self {
        let n = weights.len();
        let mut p = Self::zero(n);
        for (i, &w) in weights.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, w);
        }
        p
    }

    /// Merges duplicate exponents by summing their coefficients.
    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (f64, Vec<u32>)>,
    ) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (c, e) in terms {
            if e.len() != nvars {
                return Err(Error::Dimension(format!(
                    "exponent of length {} in a polynomial of {nvars} variables",
                    e.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exponents: Vec<u32>, coeff: f64) {
        let c = self.terms.entry(exponents).or_insert(0.0);
        *c += coeff;
        if *c == 0.0 {
            self.terms.retain(|_, c| *c != 0.0);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (lexicographic exponent) order.
    pub fn terms(&self) -> impl Iterator<Item = (f64, &[u32])> + '_ {
        self.terms.iter().map(|(e, &c)| (c, e.as_slice()))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, &c)| {
                e.iter()
                    .zip(x)
                    .filter(|(&k, _)| k > 0)
                    .fold(c, |acc, (&k, &xi)| acc * xi.powi(k as i32))
            })
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, &c) in &self.terms {
            p.add_term(e.clone(), c * s);
        }
        p
    }

    /// Re-expresses the polynomial in `nvars` variables with variable `i`
    /// renamed to `i + offset`.
    pub fn embed(&self, nvars: usize, offset: usize) -> Result<Self> {
        if offset + self.nvars > nvars {
            return Err(Error::Dimension(format!(
                "cannot place {} variables at offset {offset} among {nvars}",
                self.nvars
            )));
        }
        let mut p = Self::zero(nvars);
        for (e, &c) in &self.terms {
            let mut ee = vec![0; nvars];
            ee[offset..offset + self.nvars].copy_from_slice(e);
            p.add_term(ee, c);
        }
        Ok(p)
    }

    fn check_same_vars(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Dimension(format!(
                "polynomials in {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_vars(other)?;
        let mut p = self.clone();
        for (e, &c) in &other.terms {
            p.add_term(e.clone(), c);
        }
        Ok(p)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_vars(other)?;
        let mut p = Self::zero(self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                p.add_term(e, ca * cb);
            }
        }
        Ok(p)
    }
}

/// Panics on a variable-count mismatch; use [`Polynomial::try_add`] otherwise.
impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs)
            .expect("polynomial variable counts differ")
    }
}

/// Panics on a variable-count mismatch; use [`Polynomial::try_mul`] otherwise.
impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs)
            .expect("polynomial variable counts differ")
    }
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    coeff: f64,
    exponents: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PolynomialDoc {
    nvars: usize,
    terms: Vec<TermDoc>,
}

impl TryFrom<PolynomialDoc> for Polynomial {
    type Error = Error;
    fn try_from(doc: PolynomialDoc) -> Result<Self> {
        Polynomial::from_terms(
            doc.nvars,
            doc.terms.into_iter().map(|t| (t.coeff, t.exponents)),
        )
    }
}

impl From<Polynomial> for PolynomialDoc {
    fn from(p: Polynomial) -> Self {
        PolynomialDoc {
            nvars: p.nvars,
            terms: p
                .terms
                .into_iter()
                .map(|(exponents, coeff)| TermDoc { coeff, exponents })
                .collect(),
        }
    }
}
