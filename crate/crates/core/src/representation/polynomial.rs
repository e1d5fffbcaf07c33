//! Multivariate polynomials with exact derivatives.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// `sum c_k x^k` over exponent vectors `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut k = vec![0; dim];
        k[i] = 1;
        let mut p = Self::zero(dim);
        p.add_term(k, 1.0);
        p
    }

    /// `|x|^2`
    pub fn norm_sq(dim: usize) -> Self {
        (0..dim).fold(Self::zero(dim), |acc, i| {
            let xi = Self::coordinate(dim, i);
            acc.add(&xi.mul(&xi))
        })
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Self {
        let mut p = Self::zero(dim);
        for (k, c) in terms {
            assert_eq!(k.len(), dim, "exponent vector length must equal the dimension");
            p.add_term(k, c);
        }
        p
    }

    fn add_term(&mut self, k: Vec<u32>, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry(k.clone()).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&k);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| k.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (k, c) in &o.terms {
            p.add_term(k.clone(), *c);
        }
        p
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut p = Self::zero(self.dim);
        for (k, c) in &self.terms {
            p.add_term(k.clone(), s * c);
        }
        p
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1.0))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Self::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let k = a.iter().zip(b).map(|(i, j)| i + j).collect();
                p.add_term(k, ca * cb);
            }
        }
        p
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(self.dim, 1.0), |acc, _| acc.mul(self))
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut p = Self::zero(self.dim);
        for (k, c) in &self.terms {
            if k[i] > 0 {
                let mut d = k.clone();
                d[i] -= 1;
                p.add_term(d, c * k[i] as f64);
            }
        }
        p
    }

    pub fn laplacian(&self) -> Self {
        (0..self.dim).fold(Self::zero(self.dim), |acc, i| acc.add(&self.partial(i).partial(i)))
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.dim).map(|i| self.partial(i)).collect()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| c * k.iter().zip(x).map(|(&e, v)| v.powi(e as i32)).product::<f64>())
            .sum()
    }
}
