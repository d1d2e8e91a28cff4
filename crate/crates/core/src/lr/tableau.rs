//! Littlewood-Richardson coefficients from the skew-tableau rule: count
//! semistandard fillings of nu/lambda with content mu whose reverse reading
//! word is a lattice word.

use crate::spectra::DynkinWeight;

struct Filler<'a> {
    lambda: &'a [i64],
    nu: &'a [i64],
    mu: &'a [i64],
    /// Cells of the skew shape in reverse reading order: rows top to bottom,
    /// each row right to left.
    cells: Vec<(usize, usize)>,
    grid: Vec<Vec<u8>>,
    used: Vec<i64>,
}

impl Filler<'_> {
    fn count(&mut self, k: usize) -> u64 {
        if k == self.cells.len() {
            return 1;
        }
        let (r, c) = self.cells[k];
        // Row weakly increasing left to right: the cell to the right bounds us above.
        let mut hi = self.mu.len() as u8;
        if c + 1 < self.nu[r] as usize {
            hi = hi.min(self.grid[r][c + 1]);
        }
        // Column strictly increasing downwards.
        let mut lo = 1u8;
        if r > 0 && c >= self.lambda[r - 1] as usize {
            lo = lo.max(self.grid[r - 1][c] + 1);
        }
        let mut total = 0;
        for v in lo..=hi {
            let vi = v as usize - 1;
            if self.used[vi] >= self.mu[vi] {
                continue;
            }
            if vi > 0 && self.used[vi] + 1 > self.used[vi - 1] {
                continue;
            }
            self.used[vi] += 1;
            self.grid[r][c] = v;
            total += self.count(k + 1);
            self.used[vi] -= 1;
        }
        self.grid[r][c] = 0;
        total
    }
}

/// c^nu_{lambda mu} for partitions (any lengths, padded with zeros).
pub fn lr_tableau_partitions(lambda: &[i64], mu: &[i64], nu: &[i64]) -> u64 {
    let len = lambda.len().max(mu.len()).max(nu.len());
    let pad = |p: &[i64]| {
        let mut v = p.to_vec();
        v.resize(len, 0);
        v
    };
    let (lambda, mu, nu) = (pad(lambda), pad(mu), pad(nu));
    if lambda.iter().sum::<i64>() + mu.iter().sum::<i64>() != nu.iter().sum::<i64>() {
        return 0;
    }
    if lambda.iter().zip(&nu).any(|(l, v)| l > v) || nu.iter().any(|&v| v < 0) {
        return 0;
    }
    let mut cells = Vec::new();
    for r in 0..len {
        for c in (lambda[r]..nu[r]).rev() {
            cells.push((r, c as usize));
        }
    }
    let width = nu.iter().copied().max().unwrap_or(0) as usize;
    let mut f = Filler {
        lambda: &lambda,
        nu: &nu,
        mu: &mu,
        cells,
        grid: vec![vec![0; width + 1]; len],
        used: vec![0; len],
    };
    f.count(0)
}

/// Same contract as [`super::hive::lr_coefficient`], by a disjoint algorithm.
pub fn lr_tableau_oracle(lambda: &DynkinWeight, mu: &DynkinWeight, nu: &DynkinWeight) -> u64 {
    match super::hive::gl_boundary(lambda, mu, nu) {
        Some([l, m, v]) => lr_tableau_partitions(&l, &m, &v),
        None => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_values() {
        assert_eq!(lr_tableau_partitions(&[2, 1], &[2, 1], &[3, 2, 1]), 2);
        assert_eq!(lr_tableau_partitions(&[1], &[1], &[2]), 1);
        assert_eq!(lr_tableau_partitions(&[1], &[1], &[1, 1]), 1);
        assert_eq!(lr_tableau_partitions(&[2, 1], &[1], &[2, 2]), 1);
        assert_eq!(lr_tableau_partitions(&[], &[2, 1], &[2, 1]), 1);
        assert_eq!(lr_tableau_partitions(&[], &[2, 1], &[3]), 0);
    }
}
