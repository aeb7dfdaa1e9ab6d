//! H-representation to generators via the double description method.
//!
//! The polyhedron `{x : A x ≤ b}` is homogenized to the cone
//! `{(x, t) : A x − b t ≤ 0, t ≥ 0}`. Constraints are inserted one at a
//! time into a representation `lineality + cone(rays)`, starting from the
//! whole space. New rays are formed only from adjacent pairs, using the
//! combinatorial test: `p` and `n` are adjacent iff no third ray is tight on
//! every constraint tight at both.

use thiserror::Error;

use crate::scalar::Scalar;
use crate::scenario::dot;

/// Default cap on intermediate rays.
pub const DEFAULT_RAY_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("double description exceeded the cap of {cap} intermediate rays")]
    SizeLimit { cap: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// `{x : A x ≤ b}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolyhedron<T: Scalar> {
    matrix: Vec<Vec<T>>,
    rhs: Vec<T>,
    dim: usize,
}

impl<T: Scalar> HPolyhedron<T> {
    pub fn new(dim: usize, matrix: Vec<Vec<T>>, rhs: Vec<T>) -> Result<Self, PolytopeError> {
        if matrix.len() != rhs.len() || matrix.iter().any(|r| r.len() != dim) {
            return Err(PolytopeError::DimensionMismatch(format!(
                "{} rows, {} right-hand sides, ambient dimension {dim}",
                matrix.len(),
                rhs.len()
            )));
        }
        Ok(Self { matrix, rhs, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[Vec<T>] {
        &self.matrix
    }

    pub fn rhs(&self) -> &[T] {
        &self.rhs
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.matrix.iter().zip(&self.rhs).all(|(a, b)| {
            let mut s = dot(a, x);
            s -= b;
            !s.strictly_positive()
        })
    }

    /// Indices of the constraints tight at `x`.
    pub fn active_set(&self, x: &[T]) -> Vec<usize> {
        self.matrix
            .iter()
            .zip(&self.rhs)
            .enumerate()
            .filter(|(_, (a, b))| dot(a, x).approx_eq(b))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Minimal generators: `P = conv(vertices) + cone(rays) + span(lines)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Generators<T: Scalar> {
    pub vertices: Vec<Vec<T>>,
    pub rays: Vec<Vec<T>>,
    pub lines: Vec<Vec<T>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct ZeroSet(Vec<u64>);

impl ZeroSet {
    fn empty(bits: usize) -> Self {
        Self(vec![0; bits.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn intersection(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn is_superset(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

struct Ray<T> {
    v: Vec<T>,
    zeros: ZeroSet,
}

/// Generators of `poly`, inserting constraints in `order` (a permutation of
/// the row indices; rows left out are appended in index order).
pub fn double_description<T: Scalar>(
    poly: &HPolyhedron<T>,
    order: &[usize],
    ray_cap: usize,
) -> Result<Generators<T>, PolytopeError> {
    let n = poly.dim + 1;
    // Homogenized rows g with g·(x, t) ≤ 0; the final row is −t ≤ 0.
    let mut rows: Vec<Vec<T>> = poly
        .matrix
        .iter()
        .zip(&poly.rhs)
        .map(|(a, b)| {
            let mut g = a.clone();
            g.push(-b.clone());
            g
        })
        .collect();
    let mut t_row = vec![T::zero(); n];
    t_row[n - 1] = -T::one();
    rows.push(t_row);

    let mut sequence: Vec<usize> = Vec::with_capacity(rows.len());
    let mut seen = vec![false; rows.len()];
    // The homogenizing constraint goes first so the cone stays in t ≥ 0.
    for &i in std::iter::once(&poly.matrix.len()).chain(order) {
        if i < rows.len() && !seen[i] {
            seen[i] = true;
            sequence.push(i);
        }
    }
    sequence.extend((0..rows.len()).filter(|&i| !seen[i]));

    let bits = rows.len();
    let mut lineality: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut e = vec![T::zero(); n];
            e[i] = T::one();
            e
        })
        .collect();
    let mut rays: Vec<Ray<T>> = Vec::new();
    let mut processed = ZeroSet::empty(bits);

    for &h in &sequence {
        let g = &rows[h];
        if let Some(k) = lineality.iter().position(|l| !dot(g, l).approx_zero()) {
            let line = lineality.swap_remove(k);
            let gl = dot(g, &line);
            let project = |v: &mut Vec<T>| {
                let mut f = dot(g, v);
                if f.is_zero() {
                    return;
                }
                f /= &gl;
                for (x, y) in v.iter_mut().zip(&line) {
                    let mut t = y.clone();
                    t *= &f;
                    *x -= &t;
                }
            };
            for l in lineality.iter_mut() {
                project(l);
            }
            for r in rays.iter_mut() {
                project(&mut r.v);
                T::normalize_direction(&mut r.v);
                r.zeros.insert(h);
            }
            let mut dir = line;
            if gl.strictly_positive() {
                for x in dir.iter_mut() {
                    *x = -x.clone();
                }
            }
            T::normalize_direction(&mut dir);
            rays.push(Ray {
                v: dir,
                zeros: processed.clone(),
            });
        } else {
            let values: Vec<T> = rays.iter().map(|r| dot(g, &r.v)).collect();
            let pos: Vec<usize> = (0..rays.len())
                .filter(|&i| values[i].strictly_positive())
                .collect();
            let neg: Vec<usize> = (0..rays.len())
                .filter(|&i| values[i].strictly_negative())
                .collect();
            if !pos.is_empty() {
                let min_common = n.saturating_sub(lineality.len() + 2);
                let mut created = Vec::new();
                for &p in &pos {
                    for &q in &neg {
                        let common = rays[p].zeros.intersection(&rays[q].zeros);
                        if common.count() < min_common {
                            continue;
                        }
                        let adjacent = rays
                            .iter()
                            .enumerate()
                            .all(|(i, r)| i == p || i == q || !r.zeros.is_superset(&common));
                        if !adjacent {
                            continue;
                        }
                        // (g·p) q − (g·q) p lies on the hyperplane g = 0.
                        let mut v: Vec<T> = rays[q]
                            .v
                            .iter()
                            .zip(&rays[p].v)
                            .map(|(a, b)| {
                                let mut x = a.clone();
                                x *= &values[p];
                                let mut y = b.clone();
                                y *= &values[q];
                                x -= &y;
                                x
                            })
                            .collect();
                        T::normalize_direction(&mut v);
                        let mut zeros = common;
                        zeros.insert(h);
                        created.push(Ray { v, zeros });
                        if rays.len() + created.len() > ray_cap {
                            return Err(PolytopeError::SizeLimit { cap: ray_cap });
                        }
                    }
                }
                let mut keep = vec![true; rays.len()];
                for &p in &pos {
                    keep[p] = false;
                }
                let mut i = 0;
                rays.retain(|_| {
                    i += 1;
                    keep[i - 1]
                });
                rays.extend(created);
            }
            for (r, v) in rays
                .iter_mut()
                .zip(values.iter().filter(|v| !v.strictly_positive()))
            {
                if v.approx_zero() {
                    r.zeros.insert(h);
                }
            }
        }
        processed.insert(h);
        if rays.len() > ray_cap {
            return Err(PolytopeError::SizeLimit { cap: ray_cap });
        }
    }

    let mut out = Generators {
        vertices: Vec::new(),
        rays: Vec::new(),
        lines: Vec::new(),
    };
    for r in rays {
        let (x, t) = r.v.split_at(n - 1);
        let t = &t[0];
        if t.strictly_positive() {
            out.vertices.push(
                x.iter()
                    .map(|v| {
                        let mut v = v.clone();
                        v /= t;
                        v
                    })
                    .collect(),
            );
        } else {
            out.rays.push(x.to_vec());
        }
    }
    out.lines = lineality
        .into_iter()
        .map(|mut l| {
            l.pop();
            l
        })
        .collect();
    Ok(out)
}
