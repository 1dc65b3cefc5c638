//! Exact nearest-source assignment on a pixel grid.
//!
//! Every pixel receives the value of the source at the smallest Euclidean
//! pixel distance; equal distances go to the source listed first.

use rayon::prelude::*;

const NO_SOURCE: usize = usize::MAX;

/// Below this many sources a linear scan beats the ring search.
const BRUTE_FORCE_LIMIT: usize = 48;

/// `sources` are `(pixel index, value)` pairs in tie-break priority order.
/// Source pixels must be distinct and in bounds.
pub(crate) fn nearest_fill(width: usize, height: usize, sources: &[(usize, f64)]) -> Vec<f64> {
    debug_assert!(!sources.is_empty());
    let s = width * height;
    let mut owner = vec![NO_SOURCE; s];
    for (rank, &(idx, _)) in sources.iter().enumerate() {
        owner[idx] = rank;
    }
    let brute = sources.len() <= BRUTE_FORCE_LIMIT;

    let mut out = vec![0.0; s];
    out.par_chunks_mut(width).enumerate().for_each(|(row, dst)| {
        for (col, o) in dst.iter_mut().enumerate() {
            let rank = if owner[row * width + col] != NO_SOURCE {
                owner[row * width + col]
            } else if brute {
                scan(width, sources, row, col)
            } else {
                rings(width, height, &owner, row, col)
            };
            *o = sources[rank].1;
        }
    });
    out
}

#[inline]
fn better(d2: usize, rank: usize, best: Option<(usize, usize)>) -> bool {
    match best {
        None => true,
        Some((bd, br)) => d2 < bd || (d2 == bd && rank < br),
    }
}

fn scan(width: usize, sources: &[(usize, f64)], row: usize, col: usize) -> usize {
    let mut best: Option<(usize, usize)> = None;
    for (rank, &(idx, _)) in sources.iter().enumerate() {
        let (r, c) = (idx / width, idx % width);
        let d2 = r.abs_diff(row).pow(2) + c.abs_diff(col).pow(2);
        if better(d2, rank, best) {
            best = Some((d2, rank));
        }
    }
    best.expect("at least one source").1
}

/// Searches square rings of growing Chebyshev radius. After finishing radius
/// `r`, every unvisited pixel lies at Euclidean distance at least `r + 1`.
fn rings(width: usize, height: usize, owner: &[usize], row: usize, col: usize) -> usize {
    let mut best: Option<(usize, usize)> = None;
    let max_r = width.max(height);
    let visit = |r: usize, c: usize, best: &mut Option<(usize, usize)>| {
        let rank = owner[r * width + c];
        if rank != NO_SOURCE {
            let d2 = r.abs_diff(row).pow(2) + c.abs_diff(col).pow(2);
            if better(d2, rank, *best) {
                *best = Some((d2, rank));
            }
        }
    };
    for rad in 1..=max_r {
        let r0 = row.saturating_sub(rad);
        let r1 = (row + rad).min(height - 1);
        let c0 = col.saturating_sub(rad);
        let c1 = (col + rad).min(width - 1);
        for r in r0..=r1 {
            let edge_row = r + rad == row || r == row + rad;
            if edge_row {
                for c in c0..=c1 {
                    visit(r, c, &mut best);
                }
            } else {
                if col >= rad {
                    visit(r, col - rad, &mut best);
                }
                if col + rad < width {
                    visit(r, col + rad, &mut best);
                }
            }
        }
        if let Some((d2, _)) = best {
            if (rad + 1) * (rad + 1) > d2 {
                break;
            }
        }
    }
    best.expect("at least one source").1
}
