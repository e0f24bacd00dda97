//! First-kind Chebyshev nodes and barycentric interpolation on intervals.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::schottky::{Interval, SchottkyData};

/// Chebyshev points cos((2j+1)π/(2M)) on [−1, 1] with their barycentric
/// weights (−1)^j sin((2j+1)π/(2M)).
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevNodes {
    pub t: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ChebyshevNodes {
    pub fn new(m: usize) -> Self {
        let angle = |j: usize| (2 * j + 1) as f64 * PI / (2 * m) as f64;
        let t = (0..m).map(|j| angle(j).cos()).collect();
        let weights = (0..m)
            .map(|j| {
                let w = angle(j).sin();
                if j % 2 == 0 {
                    w
                } else {
                    -w
                }
            })
            .collect();
        ChebyshevNodes { t, weights }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Row r with p(t) = Σ r_j p(t_j) for every polynomial p of degree < M.
    /// At a node the row is the exact unit vector.
    pub fn interpolation_row(&self, t: f64, row: &mut [f64]) {
        if let Some(k) = self.t.iter().position(|&tj| tj == t) {
            row.fill(0.0);
            row[k] = 1.0;
            return;
        }
        let mut sum = 0.0;
        for ((r, &tj), &wj) in row.iter_mut().zip(&self.t).zip(&self.weights) {
            *r = wj / (t - tj);
            sum += *r;
        }
        for r in row.iter_mut() {
            *r /= sum;
        }
    }
}

/// M Chebyshev nodes on one interval per letter.
///
/// The interval for letter `a` is the hull of its children's intervals,
/// which contains every point where the operators evaluate functions on
/// that letter and stays a fixed distance from the singularities.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationGrid {
    pub m: usize,
    pub cheb: ChebyshevNodes,
    pub domains: Vec<Interval>,
}

impl CollocationGrid {
    pub fn new(data: &SchottkyData, m: usize) -> Result<Self> {
        if m < 4 {
            return Err(Error::param("M", format!("need at least 4 nodes, got {m}")));
        }
        let domains = (0..data.letters()).map(|a| data.hull_interval(a)).collect();
        Ok(CollocationGrid {
            m,
            cheb: ChebyshevNodes::new(m),
            domains,
        })
    }

    pub fn letters(&self) -> usize {
        self.domains.len()
    }

    pub fn size(&self) -> usize {
        self.m * self.domains.len()
    }

    pub fn to_reference(&self, a: usize, x: f64) -> f64 {
        let d = self.domains[a];
        (x - d.center()) / d.half_width()
    }

    pub fn node(&self, a: usize, j: usize) -> f64 {
        let d = self.domains[a];
        d.center() + d.half_width() * self.cheb.t[j]
    }

    pub fn nodes(&self, a: usize) -> Vec<f64> {
        (0..self.m).map(|j| self.node(a, j)).collect()
    }

    pub fn interpolation_row(&self, a: usize, x: f64, row: &mut [f64]) {
        self.cheb.interpolation_row(self.to_reference(a, x), row);
    }
}
