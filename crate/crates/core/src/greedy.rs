//! Greedy construction: density-ordered accumulation compared against the
//! best single affordable item.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::instance::Instance;
use crate::solution::Solution;

/// Marginal weight per unit cost, compared exactly. A zero-cost item with
/// positive gain ranks above every finite ratio; a zero-cost item with zero
/// gain ranks as ratio 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Density {
    pub gain: i64,
    pub cost: i64,
}

impl Density {
    fn cmp_ratio(&self, other: &Self) -> Ordering {
        let inf = |d: &Density| d.cost == 0 && d.gain > 0;
        match (inf(self), inf(other)) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            _ => {
                // 0/0 behaves as 0/1
                let (sc, oc) = (self.cost.max(1) as i128, other.cost.max(1) as i128);
                (self.gain as i128 * oc).cmp(&(other.gain as i128 * sc))
            }
        }
    }
}

/// Heap entry: ordered by ratio, then larger gain, then smaller item index.
#[derive(Debug, PartialEq, Eq)]
struct Candidate {
    density: Density,
    item: usize,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.density
            .cmp_ratio(&other.density)
            .then(self.density.gain.cmp(&other.density.gain))
            .then(other.item.cmp(&self.item))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Density-greedy accumulation alone (the first of the two candidates).
///
/// Marginal gains never increase as the set grows and an item that no
/// longer fits never fits again, so stale heap keys are upper bounds and the
/// lazy evaluation selects exactly the same item as a full rescan.
pub fn greedy_accumulate(inst: &Instance) -> Solution {
    let mut sol = Solution::empty(inst);
    let mut heap: BinaryHeap<Candidate> = (0..inst.n())
        .filter(|&i| inst.cost(i) <= inst.budget())
        .map(|i| Candidate {
            density: Density {
                gain: sol.gain(inst, i),
                cost: inst.cost(i),
            },
            item: i,
        })
        .collect();

    while let Some(top) = heap.pop() {
        let i = top.item;
        if !sol.flip_feasible(inst, i) {
            continue;
        }
        let fresh = Density {
            gain: sol.gain(inst, i),
            cost: inst.cost(i),
        };
        if fresh != top.density {
            heap.push(Candidate {
                density: fresh,
                item: i,
            });
            continue;
        }
        sol.flip(inst, i);
    }
    sol
}

/// The affordable item with the largest individual weight, ties to the
/// smaller index.
pub fn best_single_item(inst: &Instance) -> Option<usize> {
    let empty = Solution::empty(inst);
    (0..inst.n())
        .filter(|&i| inst.cost(i) <= inst.budget())
        .map(|i| (empty.gain(inst, i), i))
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
        .map(|(_, i)| i)
}

/// Returns the better of [`greedy_accumulate`] and the best single item.
/// The single item replaces the accumulation only when strictly better.
pub fn greedy_construct(inst: &Instance) -> Solution {
    let accumulated = greedy_accumulate(inst);
    match best_single_item(inst) {
        Some(q) => {
            let single = Solution::from_items(inst, &[q]);
            if accumulated.weight() < single.weight() {
                single
            } else {
                accumulated
            }
        }
        None => accumulated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::instance_x;
    use proptest::prelude::*;

    /// Literal full-rescan version of the accumulation loop.
    fn rescan_accumulate(inst: &Instance) -> Solution {
        let mut sol = Solution::empty(inst);
        loop {
            let best = (0..inst.n())
                .filter(|&i| !sol.contains(i) && sol.cost() + inst.cost(i) <= inst.budget())
                .map(|i| Candidate {
                    density: Density {
                        gain: sol.gain(inst, i),
                        cost: inst.cost(i),
                    },
                    item: i,
                })
                .max();
            match best {
                Some(c) => sol.flip(inst, c.item),
                None => return sol,
            }
        }
    }

    #[test]
    fn two_item_example_prefers_single() {
        let inst = Instance::new(10, vec![1, 10], vec![1, 9], vec![vec![0], vec![1]]).unwrap();
        assert_eq!(greedy_accumulate(&inst).items(), vec![0]);
        assert_eq!(best_single_item(&inst), Some(1));
        let out = greedy_construct(&inst);
        assert_eq!(out.items(), vec![1]);
        assert_eq!(out.weight(), 9);
    }

    #[test]
    fn instance_x_candidates() {
        let x = instance_x();
        // items 2 and 3 tie at ratio 4; the larger gain (item 3) wins and
        // nothing else fits afterwards
        let acc = greedy_accumulate(&x);
        assert_eq!(acc.items(), vec![2]);
        assert_eq!(acc.weight(), 16);
        assert_eq!(best_single_item(&x), Some(2));
        let out = greedy_construct(&x);
        assert_eq!(out.items(), vec![2]);
        assert_eq!(out.weight(), 16);
    }

    #[test]
    fn nothing_fits() {
        let inst = Instance::new(3, vec![4, 5], vec![1, 1], vec![vec![0], vec![1]]).unwrap();
        let out = greedy_construct(&inst);
        assert!(out.is_empty());
        assert_eq!(out.weight(), 0);
    }

    #[test]
    fn zero_cost_items_rank_first() {
        // item 0 is free and covers something new; item 1 has a huge ratio
        let inst = Instance::new(1, vec![0, 1], vec![1, 100], vec![vec![0], vec![1]]).unwrap();
        let acc = greedy_accumulate(&inst);
        assert_eq!(acc.items(), vec![0, 1]);
    }

    #[test]
    fn density_ordering() {
        let d = |gain, cost| Density { gain, cost };
        assert_eq!(d(5, 0).cmp_ratio(&d(1000, 1)), Ordering::Greater);
        assert_eq!(d(0, 0).cmp_ratio(&d(0, 7)), Ordering::Equal);
        assert_eq!(d(12, 3).cmp_ratio(&d(16, 4)), Ordering::Equal);
        assert_eq!(d(1, 3).cmp_ratio(&d(1, 4)), Ordering::Greater);
    }

    fn small_instance() -> impl Strategy<Value = Instance> {
        (1usize..14, 1usize..14).prop_flat_map(|(n, m)| {
            (
                0i64..60,
                prop::collection::vec(0i64..20, n),
                prop::collection::vec(0i64..20, m),
                prop::collection::vec(prop::collection::btree_set(0..m, 0..=m), n),
            )
                .prop_map(|(l, c, w, cov)| {
                    Instance::new(l, c, w, cov.into_iter().map(|s| s.into_iter().collect()).collect())
                        .unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn lazy_matches_rescan(inst in small_instance()) {
            prop_assert_eq!(greedy_accumulate(&inst), rescan_accumulate(&inst));
        }

        #[test]
        fn feasible_and_dominates_singles(inst in small_instance()) {
            let out = greedy_construct(&inst);
            prop_assert!(out.is_feasible(&inst));
            let empty = Solution::empty(&inst);
            for q in (0..inst.n()).filter(|&q| inst.cost(q) <= inst.budget()) {
                prop_assert!(out.weight() >= empty.gain(&inst, q));
            }
            for i in (0..inst.n()).filter(|&i| inst.cost(i) == 0) {
                // free items never leave uncovered weight behind
                prop_assert!(out.contains(i) || out.gain(&inst, i) == 0 || out.len() == 1);
            }
        }
    }
}
