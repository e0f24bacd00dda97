//! Collocation matrices of the (refined) transfer operators
//!
//!   L_{Z,s} f(x) = Σ_{𝐚 ∈ Z, 𝐚 ⇝ b} γ_{𝐚′}′(x)^s f(γ_{𝐚′}(x)),  x ∈ I_b,
//!
//! where 𝐚 ⇝ b means the last letter of 𝐚 is b.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::schottky::SchottkyData;
use crate::transfer::chebyshev::CollocationGrid;
use crate::words::{words_of_length, Word};

/// γ′^s on the branch that is positive for real γ′ > 0 and real s, reached
/// by continuity from the real point where γ′ = `base_point_value`.
///
/// Values of γ′ in the closed left half-plane are reported rather than
/// silently placed on the principal branch.
pub fn complex_power(gprime: Complex64, s: Complex64, base_point_value: f64) -> Result<Complex64> {
    if !(base_point_value > 0.0) {
        return Err(Error::param(
            "base_point_value",
            "the branch is anchored at a positive real derivative",
        ));
    }
    if !(gprime.re > 0.0) {
        return Err(Error::BranchTracking { value: gprime });
    }
    Ok((s * gprime.ln()).exp())
}

/// One word's contribution: rows of target letter `target` read values of
/// the source letter through `interp`, weighted by γ′^s.
#[derive(Debug, Clone)]
struct Block {
    target: usize,
    source: usize,
    /// log γ_{𝐚′}′ at the target nodes.
    log_deriv: Vec<f64>,
    /// M × M barycentric interpolation onto the image nodes.
    interp: DMatrix<f64>,
}

/// The s-independent part of L_{Z,s}: everything except the powers.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    grid: CollocationGrid,
    blocks: Vec<Block>,
}

/// A discretised L_{Z,s} at one s.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub s: Complex64,
    pub m: usize,
    pub entries: DMatrix<Complex64>,
}

impl TransferOperator {
    /// The operator for an arbitrary finite set of nonempty admissible words.
    pub fn new(data: &SchottkyData, words: &[Word], m: usize) -> Result<Self> {
        let grid = CollocationGrid::new(data, m)?;
        for w in words {
            w.check(data)?;
            if w.is_empty() {
                return Err(Error::param("words", "the empty word is not allowed"));
            }
        }
        let blocks = words
            .par_iter()
            .map(|w| Self::block(data, &grid, w))
            .collect::<Result<Vec<_>>>()?;
        Ok(TransferOperator { grid, blocks })
    }

    /// The standard operator L_s (words of length 2).
    pub fn standard(data: &SchottkyData, m: usize) -> Result<Self> {
        Self::new(data, &words_of_length(data, 2), m)
    }

    fn block(data: &SchottkyData, grid: &CollocationGrid, w: &Word) -> Result<Block> {
        let target = w.last().expect("nonempty");
        let source = w.first().expect("nonempty");
        let map = w.parent().map(data);
        let m = grid.m;
        if w.len() == 1 {
            // γ_∅ is the identity: reading a node back is exact
            return Ok(Block {
                target,
                source,
                log_deriv: vec![0.0; m],
                interp: DMatrix::identity(m, m),
            });
        }
        let src = grid.domains[source];
        let slack = 1e-12 * (1.0 + src.left.abs().max(src.right.abs()));
        let mut interp = DMatrix::<f64>::zeros(m, m);
        let mut log_deriv = Vec::with_capacity(m);
        let mut row = vec![0.0; m];
        let [_, _, c, d] = map.entries();
        for i in 0..m {
            let x = grid.node(target, i);
            let y = map.apply_real(x);
            if !(y >= src.left - slack && y <= src.right + slack) {
                return Err(Error::param(
                    "words",
                    format!("image of the grid for word {w} leaves the source interval"),
                ));
            }
            log_deriv.push(-2.0 * (c * x + d).abs().ln());
            grid.interpolation_row(source, y, &mut row);
            for j in 0..m {
                interp[(i, j)] = row[j];
            }
        }
        Ok(Block {
            target,
            source,
            log_deriv,
            interp,
        })
    }

    pub fn grid(&self) -> &CollocationGrid {
        &self.grid
    }

    pub fn size(&self) -> usize {
        self.grid.size()
    }

    fn accumulate<T, F>(&self, weight: F) -> DMatrix<T>
    where
        T: ComplexField<RealField = f64> + Copy,
        F: Fn(f64) -> T,
    {
        let m = self.grid.m;
        let n = self.size();
        let mut out = DMatrix::<T>::from_element(n, n, T::zero());
        for b in &self.blocks {
            for i in 0..m {
                let wgt = weight(b.log_deriv[i]);
                let row = b.target * m + i;
                for j in 0..m {
                    let p = b.interp[(i, j)];
                    if p != 0.0 {
                        out[(row, b.source * m + j)] += wgt * T::from_real(p);
                    }
                }
            }
        }
        out
    }

    /// L_{Z,s} on the collocation grid.
    pub fn matrix(&self, s: Complex64) -> DMatrix<Complex64> {
        self.accumulate(|lg| (s * lg).exp())
    }

    /// ∂_s L_{Z,s}.
    pub fn derivative_matrix(&self, s: Complex64) -> DMatrix<Complex64> {
        self.accumulate(|lg| (s * lg).exp() * lg)
    }

    /// L_{Z,s} for real s, with weights |γ′|^s.
    pub fn matrix_real(&self, s: f64) -> DMatrix<f64> {
        self.accumulate(|lg| (s * lg).exp())
    }

    pub fn transfer_matrix(&self, s: Complex64) -> TransferMatrix {
        TransferMatrix {
            s,
            m: self.grid.m,
            entries: self.matrix(s),
        }
    }

    /// Largest relative size of the last two Chebyshev coefficients of the
    /// weights γ′^s on each target interval. Values near machine precision
    /// mean M resolves the operator at this s.
    pub fn resolution_residual(&self, s: Complex64) -> f64 {
        let m = self.grid.m;
        let theta = |j: usize| (2 * j + 1) as f64 * std::f64::consts::PI / (2 * m) as f64;
        self.blocks
            .iter()
            .map(|b| {
                let vals: Vec<Complex64> = b.log_deriv.iter().map(|&lg| (s * lg).exp()).collect();
                let coeff = |k: usize| -> f64 {
                    let c: Complex64 = (0..m).map(|j| vals[j] * (k as f64 * theta(j)).cos()).sum();
                    c.norm() * 2.0 / m as f64
                };
                let head = coeff(0).max(1e-300);
                (coeff(m - 1) + coeff(m - 2)) / head
            })
            .fold(0.0, f64::max)
    }

    /// Applies the matrix at s to node values.
    pub fn apply(&self, s: Complex64, u: &DVector<Complex64>) -> DVector<Complex64> {
        self.matrix(s) * u
    }
}

/// L_{Z,s} for a partition Z, checked to be prefix-complete.
pub fn assemble_transfer(
    data: &SchottkyData,
    partition: &Partition,
    s: Complex64,
    m: usize,
) -> Result<TransferMatrix> {
    partition.check(data)?;
    Ok(TransferOperator::new(data, &partition.words, m)?.transfer_matrix(s))
}
