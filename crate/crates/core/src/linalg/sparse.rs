use crate::error::{Error, Result};

/// Relative tolerance on `|a_ij - a_ji|`, scaled by the larger row maximum.
pub const SYMMETRY_TOLERANCE: f64 = 1e-14;

/// Symmetric matrix in compressed row form, both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

/// Sums duplicate triplets (in input order), checks symmetry and stores the
/// exactly symmetrized matrix.
pub fn assemble_from_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Result<SparseSymMatrix> {
    if let Some(&(i, j, _)) = triplets.iter().find(|(i, j, _)| *i >= dim || *j >= dim) {
        return Err(Error::Assembly(format!("entry ({i}, {j}) outside a {dim}x{dim} matrix")));
    }
    if let Some(&(i, j, v)) = triplets.iter().find(|t| !t.2.is_finite()) {
        return Err(Error::Assembly(format!("non-finite entry {v} at ({i}, {j})")));
    }
    let mut counts = vec![0usize; dim + 1];
    for &(i, _, _) in triplets {
        counts[i + 1] += 1;
    }
    for i in 0..dim {
        counts[i + 1] += counts[i];
    }
    let mut slots = counts.clone();
    let mut raw: Vec<(usize, f64)> = vec![(0, 0.0); triplets.len()];
    for &(i, j, v) in triplets {
        raw[slots[i]] = (j, v);
        slots[i] += 1;
    }

    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for i in 0..dim {
        let row = &mut raw[counts[i]..counts[i + 1]];
        // stable: duplicates keep their input order
        row.sort_by_key(|&(j, _)| j);
        for &(j, v) in row.iter() {
            if cols.len() > row_ptr[i] && *cols.last().unwrap() == j {
                *values.last_mut().unwrap() += v;
            } else {
                cols.push(j);
                values.push(v);
            }
        }
        row_ptr.push(cols.len());
    }
    let mut m = SparseSymMatrix {
        dim,
        row_ptr,
        cols,
        values,
    };
    m.check_and_symmetrize()?;
    Ok(m)
}

impl SparseSymMatrix {
    fn check_and_symmetrize(&mut self) -> Result<()> {
        let row_max: Vec<f64> = (0..self.dim)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).fold(0.0, f64::max))
            .collect();
        let mut updates = Vec::new();
        for i in 0..self.dim {
            for (j, a_ij) in self.row(i) {
                if j <= i {
                    continue;
                }
                let a_ji = self.get(j, i);
                let scale = row_max[i].max(row_max[j]);
                if (a_ij - a_ji).abs() > SYMMETRY_TOLERANCE * scale {
                    return Err(Error::Assembly(format!(
                        "asymmetric entries ({i}, {j}) = {a_ij:e} and ({j}, {i}) = {a_ji:e}"
                    )));
                }
                if a_ij != a_ji {
                    updates.push((i, j, 0.5 * (a_ij + a_ji)));
                }
            }
        }
        for (i, j, v) in updates {
            *self.entry_mut(i, j).unwrap() = v;
            // the mirror entry exists: otherwise a_ji = 0 and the check above would
            // have required a_ij = 0 too, which needs no update
            if let Some(e) = self.entry_mut(j, i) {
                *e = v;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(pos) => self.values[r.start + pos],
            Err(_) => 0.0,
        }
    }

    fn entry_mut(&mut self, i: usize, j: usize) -> Option<&mut f64> {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        let pos = self.cols[r.clone()].binary_search(&j).ok()?;
        Some(&mut self.values[r.start + pos])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    /// `b - A x` with error-free product and sum accumulation, so the result is
    /// accurate to about one rounding of the true residual.
    pub fn residual(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| {
                let (mut s, mut c) = (b[i], 0.0);
                for (j, v) in self.row(i) {
                    let p = -v * x[j];
                    let pe = (-v).mul_add(x[j], -p);
                    let t = s + p;
                    let bp = t - s;
                    c += (s - (t - bp)) + (p - bp) + pe;
                    s = t;
                }
                s + c
            })
            .collect()
    }

    /// Scales every entry, keeping the pattern.
    pub fn scaled(&self, factor: f64) -> SparseSymMatrix {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= factor);
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assembles_two_by_two() {
        let m = assemble_from_triplets(2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)]).unwrap();
        assert_eq!(m.get(0, 0), 2.0);
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(1, 0), 1.0);
        assert_eq!(m.get(1, 1), 2.0);
        assert_eq!(m.nnz(), 4);
    }

    #[test]
    fn duplicates_are_summed() {
        let m = assemble_from_triplets(1, &[(0, 0, 1.0), (0, 0, 1.0)]).unwrap();
        assert_eq!(m.get(0, 0), 2.0);
    }

    #[test]
    fn asymmetry_is_rejected() {
        let err = assemble_from_triplets(2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0)]);
        assert!(matches!(err, Err(Error::Assembly(_))));
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(matches!(
            assemble_from_triplets(2, &[(0, 2, 1.0)]),
            Err(Error::Assembly(_))
        ));
    }

    #[test]
    fn roundoff_asymmetry_is_symmetrized() {
        let eps = 1e-17;
        let m = assemble_from_triplets(2, &[(0, 0, 1.0), (0, 1, 0.5), (1, 0, 0.5 + eps), (1, 1, 1.0)]).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));
    }

    #[test]
    fn residual_matches_plain_arithmetic_on_exact_data() {
        let m = assemble_from_triplets(2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)]).unwrap();
        assert_eq!(m.residual(&[1.0, 1.0], &[3.0, 3.0]), vec![0.0, 0.0]);
        assert_eq!(m.mul_vec(&[1.0, -1.0]), vec![1.0, -1.0]);
    }
}
