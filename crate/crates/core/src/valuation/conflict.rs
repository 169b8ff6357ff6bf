//! Maximum-weight independent set by branch-and-bound with
//! highest-degree branching.

use num_traits::Zero;

use crate::rational::Rational;

/// Maximum-weight independent subset of `vertices` in the graph given by
/// `adjacent`. Zero-weight vertices are never chosen.
pub fn max_weight_independent_set(
    vertices: &[usize],
    weights: &[Rational],
    adjacent: impl Fn(usize, usize) -> bool,
) -> (Vec<usize>, Rational) {
    let verts: Vec<usize> = vertices.iter().copied().filter(|&v| !weights[v].is_zero()).collect();
    let k = verts.len();
    assert!(k <= 64, "branch-and-bound works on at most 64 vertices");
    let mut nbr = vec![0u64; k];
    for a in 0..k {
        for b in a + 1..k {
            if adjacent(verts[a], verts[b]) {
                nbr[a] |= 1 << b;
                nbr[b] |= 1 << a;
            }
        }
    }
    let w: Vec<Rational> = verts.iter().map(|&v| weights[v].clone()).collect();

    struct Search<'a> {
        nbr: &'a [u64],
        w: &'a [Rational],
        best: Rational,
        best_mask: u64,
    }
    impl Search<'_> {
        fn weight(&self, mut mask: u64) -> Rational {
            let mut total = Rational::zero();
            while mask != 0 {
                let v = mask.trailing_zeros() as usize;
                total += &self.w[v];
                mask &= mask - 1;
            }
            total
        }
        fn go(&mut self, candidates: u64, chosen: u64, value: Rational) {
            if &value + self.weight(candidates) <= self.best && chosen != 0 {
                return;
            }
            // vertex of maximum degree inside the candidate set
            let mut pick = None;
            let mut pick_deg = 0;
            let mut rest = candidates;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let deg = (self.nbr[v] & candidates).count_ones();
                if deg > pick_deg {
                    pick_deg = deg;
                    pick = Some(v);
                }
            }
            match pick {
                None => {
                    let total = &value + self.weight(candidates);
                    if total > self.best || self.best_mask == 0 && total >= self.best {
                        self.best = total;
                        self.best_mask = chosen | candidates;
                    }
                }
                Some(v) => {
                    let bit = 1u64 << v;
                    self.go(candidates & !bit & !self.nbr[v], chosen | bit, &value + &self.w[v]);
                    self.go(candidates & !bit, chosen, value);
                }
            }
        }
    }
    let all = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let mut s = Search { nbr: &nbr, w: &w, best: Rational::zero(), best_mask: 0 };
    s.go(all, 0, Rational::zero());
    let chosen: Vec<usize> = (0..k).filter(|b| s.best_mask >> b & 1 == 1).map(|b| verts[b]).collect();
    (chosen, s.best)
}
