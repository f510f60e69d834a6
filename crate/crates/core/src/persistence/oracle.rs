//! Dense rank computation of boundary maps, kept independent of the sparse
//! reduction so the two can check each other.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::filtration::FilteredComplex;

pub const DEFAULT_ORACLE_LIMIT: usize = 2048;

/// Betti numbers `β_0..=β_top` of the sub-complex at `scale`, from GF(2)
/// ranks: `β_k = (#k-cells - rank ∂_k) - rank ∂_{k+1}`.
pub fn betti_oracle(fc: &FilteredComplex, scale: f64) -> Result<Vec<usize>> {
    betti_oracle_with_limit(fc, scale, DEFAULT_ORACLE_LIMIT)
}

pub fn betti_oracle_with_limit(
    fc: &FilteredComplex,
    scale: f64,
    limit: usize,
) -> Result<Vec<usize>> {
    if fc.len() > limit {
        return Err(Error::TooLarge {
            cells: fc.len(),
            limit,
        });
    }
    let sub = fc.sublevel(scale);
    let Some(top) = fc.max_dim() else {
        return Ok(Vec::new());
    };
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); top + 2];
    for (i, c) in sub.cells().iter().enumerate() {
        by_dim[c.dim].push(i);
    }
    let mut local: HashMap<&[usize], usize> = HashMap::new();
    for ids in &by_dim {
        for (row, &i) in ids.iter().enumerate() {
            local.insert(sub.cells()[i].vertices.as_slice(), row);
        }
    }
    // rank[k] = rank of the map from k-chains to (k-1)-chains
    let mut rank = vec![0usize; top + 2];
    for k in 1..=top {
        let rows = by_dim[k - 1].len();
        let words = rows.div_ceil(64);
        let mut matrix: Vec<Vec<u64>> = by_dim[k]
            .iter()
            .map(|&i| {
                let mut bits = vec![0u64; words];
                for face in sub.faces(&sub.cells()[i]) {
                    let r = *local
                        .get(face.as_slice())
                        .ok_or_else(|| Error::MissingFace(sub.cells()[i].vertices.clone()))?;
                    bits[r / 64] ^= 1 << (r % 64);
                }
                Ok(bits)
            })
            .collect::<Result<_>>()?;
        rank[k] = gf2_rank(&mut matrix, rows);
    }
    Ok((0..=top)
        .map(|k| by_dim[k].len() - rank[k] - rank[k + 1])
        .collect())
}

fn gf2_rank(rows_of_bits: &mut [Vec<u64>], width: usize) -> usize {
    let mut rank = 0;
    for bit in 0..width {
        let (w, mask) = (bit / 64, 1u64 << (bit % 64));
        let Some(p) = (rank..rows_of_bits.len()).find(|&r| rows_of_bits[r][w] & mask != 0) else {
            continue;
        };
        rows_of_bits.swap(rank, p);
        let pivot = rows_of_bits[rank].clone();
        for (r, row) in rows_of_bits.iter_mut().enumerate() {
            if r != rank && row[w] & mask != 0 {
                row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complex(cells: &[&[usize]]) -> FilteredComplex {
        FilteredComplex::simplicial(cells.iter().map(|v| (v.to_vec(), 0.0))).unwrap()
    }

    #[test]
    fn four_cycle() {
        let fc = complex(&[&[0], &[1], &[2], &[3], &[0, 1], &[1, 2], &[2, 3], &[0, 3]]);
        assert_eq!(betti_oracle(&fc, 0.0).unwrap(), vec![1, 1]);
    }

    #[test]
    fn disjoint_edges() {
        let fc = complex(&[&[0], &[1], &[2], &[3], &[0, 1], &[2, 3]]);
        assert_eq!(betti_oracle(&fc, 0.0).unwrap(), vec![2, 0]);
    }

    #[test]
    fn filled_triangle() {
        let fc = complex(&[&[0], &[1], &[2], &[0, 1], &[1, 2], &[0, 2], &[0, 1, 2]]);
        assert_eq!(betti_oracle(&fc, 0.0).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn sublevel_and_limit() {
        let fc = FilteredComplex::simplicial([(vec![0], 0.0), (vec![1], 0.0), (vec![0, 1], 2.0)])
            .unwrap();
        assert_eq!(betti_oracle(&fc, 1.0).unwrap(), vec![2, 0]);
        assert_eq!(betti_oracle(&fc, 2.0).unwrap(), vec![1, 0]);
        assert!(matches!(
            betti_oracle_with_limit(&fc, 1.0, 2),
            Err(Error::TooLarge { .. })
        ));
    }
}
