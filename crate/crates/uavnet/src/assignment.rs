//! User partitioning: gain-sorted grouping onto non-real-time RF channels
//! and the half-split assignment of users to two UAVs.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::LinkBudget;
use crate::error::{Error, Result};
use crate::scenario::User;

/// Which RF channel group and UAV each user landed on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupingPlan {
    /// User-id lists per non-real-time channel, best channel quality first.
    pub groups: Vec<Vec<usize>>,
    /// UAV index serving each user.
    pub uav_of_user: BTreeMap<usize, usize>,
}

impl GroupingPlan {
    /// Flat `(user_id, uav, group)` rows sorted by user id.
    pub fn rows(&self) -> Vec<(usize, usize, usize)> {
        let mut rows: Vec<(usize, usize, usize)> = self
            .groups
            .iter()
            .enumerate()
            .flat_map(|(g, ids)| ids.iter().map(move |&id| (id, g)))
            .map(|(id, g)| (id, self.uav_of_user.get(&id).copied().unwrap_or(0), g))
            .collect();
        rows.sort_unstable();
        rows
    }
}

fn check_finite_gains(links: &[LinkBudget]) -> Result<()> {
    for link in links {
        if !link.gain_linear.is_finite() || !(link.gain_linear > 0.0) {
            return Err(Error::Domain(format!(
                "user {} has non-positive or non-finite gain {}",
                link.user_id, link.gain_linear
            )));
        }
    }
    Ok(())
}

/// Splits an ordered id list into `k` contiguous runs whose sizes differ by
/// at most one, larger runs first.
fn split_near_equal(ordered_ids: &[usize], k: usize) -> Vec<Vec<usize>> {
    let n = ordered_ids.len();
    let base = n / k;
    let remainder = n % k;
    let mut groups = Vec::with_capacity(k);
    let mut start = 0;
    for g in 0..k {
        let size = base + usize::from(g < remainder);
        groups.push(ordered_ids[start..start + size].to_vec());
        start += size;
    }
    groups
}

/// Groups users onto `k_n` channels by descending expected gain, contiguous
/// runs of the sorted order, near-equal sizes. Ties break on user id.
pub fn group_users_by_gain(links: &[LinkBudget], k_n: usize) -> Result<Vec<Vec<usize>>> {
    if k_n == 0 {
        return Err(Error::InvalidProblem("k_n must be at least 1".to_string()));
    }
    if links.len() < k_n {
        return Err(Error::TooManyGroups {
            groups: k_n,
            users: links.len(),
        });
    }
    check_finite_gains(links)?;
    let mut order: Vec<&LinkBudget> = links.iter().collect();
    order.sort_by(|a, b| {
        b.gain_linear
            .partial_cmp(&a.gain_linear)
            .expect("gains checked finite")
            .then(a.user_id.cmp(&b.user_id))
    });
    let ids: Vec<usize> = order.iter().map(|l| l.user_id).collect();
    Ok(split_near_equal(&ids, k_n))
}

/// Assigns each user to one of two UAVs: sort by the gain difference
/// `g_{i,1} - g_{i,2}` descending (ties by id) and send the first half,
/// rounded up, to UAV 0.
pub fn assign_two_uavs(
    links_uav1: &[LinkBudget],
    links_uav2: &[LinkBudget],
) -> Result<BTreeMap<usize, usize>> {
    check_finite_gains(links_uav1)?;
    check_finite_gains(links_uav2)?;
    let second: BTreeMap<usize, f64> = links_uav2
        .iter()
        .map(|l| (l.user_id, l.gain_linear))
        .collect();
    if second.len() != links_uav2.len() {
        return Err(Error::MismatchedUserSets);
    }
    if links_uav1.len() != links_uav2.len() {
        return Err(Error::MismatchedUserSets);
    }
    let mut diffs: Vec<(usize, f64)> = Vec::with_capacity(links_uav1.len());
    let mut seen = std::collections::BTreeSet::new();
    for link in links_uav1 {
        let Some(g2) = second.get(&link.user_id) else {
            return Err(Error::MismatchedUserSets);
        };
        if !seen.insert(link.user_id) {
            return Err(Error::MismatchedUserSets);
        }
        diffs.push((link.user_id, link.gain_linear - g2));
    }
    diffs.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("differences of finite gains")
            .then(a.0.cmp(&b.0))
    });
    let first_half = diffs.len().div_ceil(2);
    Ok(diffs
        .iter()
        .enumerate()
        .map(|(rank, &(id, _))| (id, usize::from(rank >= first_half)))
        .collect())
}

/// Random near-equal partition onto `k_n` channels; the conventional
/// baseline where each user picks a channel with no regard to quality.
pub fn baseline_even_grouping(users: &[User], k_n: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k_n == 0 {
        return Err(Error::InvalidProblem("k_n must be at least 1".to_string()));
    }
    if users.len() < k_n {
        return Err(Error::TooManyGroups {
            groups: k_n,
            users: users.len(),
        });
    }
    let mut ids: Vec<usize> = users.iter().map(|u| u.id).collect();
    ids.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    Ok(split_near_equal(&ids, k_n))
}

/// Complete grouping for one UAV serving everyone.
pub fn single_uav_grouping(links: &[LinkBudget], k_n: usize) -> Result<GroupingPlan> {
    let groups = group_users_by_gain(links, k_n)?;
    let uav_of_user = links.iter().map(|l| (l.user_id, 0)).collect();
    Ok(GroupingPlan {
        groups,
        uav_of_user,
    })
}

/// Complete grouping for two UAVs: half-split assignment, then gain-sorted
/// grouping within each UAV's user set against that UAV's own gains. The
/// first `k_n/2` groups belong to UAV 0.
pub fn two_uav_grouping(
    links_uav1: &[LinkBudget],
    links_uav2: &[LinkBudget],
    k_n: usize,
) -> Result<GroupingPlan> {
    if !k_n.is_multiple_of(2) {
        return Err(Error::OddGroupCount(k_n));
    }
    let uav_of_user = assign_two_uavs(links_uav1, links_uav2)?;
    let half_k = k_n / 2;
    let own_links = |uav: usize, links: &[LinkBudget]| -> Vec<LinkBudget> {
        links
            .iter()
            .filter(|l| uav_of_user.get(&l.user_id) == Some(&uav))
            .copied()
            .collect()
    };
    let first = own_links(0, links_uav1);
    let second = own_links(1, links_uav2);
    let mut groups = group_users_by_gain(&first, half_k)?;
    groups.extend(group_users_by_gain(&second, half_k)?);
    Ok(GroupingPlan {
        groups,
        uav_of_user,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lb(user_id: usize, gain_linear: f64) -> LinkBudget {
        LinkBudget {
            user_id,
            uav_index: 0,
            distance_3d_m: 500.0,
            distance_h_m: 0.0,
            p_los: 1.0,
            gain_linear,
            gain_db: 10.0 * gain_linear.log10(),
        }
    }

    fn users(n: usize) -> Vec<User> {
        (0..n)
            .map(|id| User {
                id,
                x_m: 0.0,
                y_m: 0.0,
            })
            .collect()
    }

    #[test]
    fn sorted_halves() {
        let links = vec![lb(0, 1.0), lb(1, 4.0), lb(2, 2.0), lb(3, 3.0)];
        let groups = group_users_by_gain(&links, 2).unwrap();
        assert_eq!(groups, vec![vec![1, 3], vec![2, 0]]);
    }

    #[test]
    fn single_group_holds_everyone() {
        let links = vec![lb(0, 1.0), lb(1, 4.0), lb(2, 2.0)];
        let groups = group_users_by_gain(&links, 1).unwrap();
        assert_eq!(groups, vec![vec![1, 2, 0]]);
    }

    #[test]
    fn group_sizes_and_gain_ordering() {
        let gains = [0.9, 0.1, 0.5, 0.7, 0.3, 0.8, 0.2, 0.6, 0.4, 1.0];
        let links: Vec<LinkBudget> = gains.iter().enumerate().map(|(id, &g)| lb(id, g)).collect();
        let groups = group_users_by_gain(&links, 4).unwrap();
        let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![3, 3, 2, 2]);
        let gain_of = |id: usize| gains[id];
        for pair in groups.windows(2) {
            let min_prev = pair[0]
                .iter()
                .map(|&id| gain_of(id))
                .fold(f64::MAX, f64::min);
            let max_next = pair[1]
                .iter()
                .map(|&id| gain_of(id))
                .fold(f64::MIN, f64::max);
            assert!(min_prev >= max_next);
        }
    }

    #[test]
    fn equal_gains_break_ties_by_id() {
        let links = vec![lb(5, 1.0), lb(2, 1.0), lb(9, 1.0), lb(0, 1.0)];
        let groups = group_users_by_gain(&links, 2).unwrap();
        assert_eq!(groups, vec![vec![0, 2], vec![5, 9]]);
    }

    #[test]
    fn too_many_groups_rejected() {
        let links = vec![lb(0, 1.0), lb(1, 2.0)];
        assert!(matches!(
            group_users_by_gain(&links, 3),
            Err(Error::TooManyGroups {
                groups: 3,
                users: 2
            })
        ));
    }

    #[test]
    fn mirror_symmetric_pair_splits_one_each() {
        let u1 = vec![lb(0, 2.0), lb(1, 1.0)];
        let u2 = vec![lb(0, 1.0), lb(1, 2.0)];
        let map = assign_two_uavs(&u1, &u2).unwrap();
        assert_eq!(map[&0], 0);
        assert_eq!(map[&1], 1);
    }

    #[test]
    fn halves_enforced_even_when_one_uav_dominates() {
        // Everyone prefers UAV 0, still half go to UAV 1.
        let u1 = vec![lb(0, 9.0), lb(1, 8.0), lb(2, 7.0), lb(3, 6.0)];
        let u2 = vec![lb(0, 1.0), lb(1, 1.0), lb(2, 1.0), lb(3, 1.0)];
        let map = assign_two_uavs(&u1, &u2).unwrap();
        let first: Vec<usize> = map
            .iter()
            .filter(|(_, &v)| v == 0)
            .map(|(&k, _)| k)
            .collect();
        assert_eq!(first, vec![0, 1]);
    }

    #[test]
    fn odd_count_gives_extra_user_to_first_uav() {
        let diffs = [0.5, -0.1, 0.3, 0.9, -0.7];
        let u1: Vec<LinkBudget> = diffs
            .iter()
            .enumerate()
            .map(|(id, &d)| lb(id, 1.0 + d))
            .collect();
        let u2: Vec<LinkBudget> = (0..5).map(|id| lb(id, 1.0)).collect();
        let map = assign_two_uavs(&u1, &u2).unwrap();
        let count_first = map.values().filter(|&&v| v == 0).count();
        assert_eq!(count_first, 3);
        // Brute-force: ranks of diffs descending are ids 3, 0, 2, 1, 4.
        assert_eq!(map[&3], 0);
        assert_eq!(map[&0], 0);
        assert_eq!(map[&2], 0);
        assert_eq!(map[&1], 1);
        assert_eq!(map[&4], 1);
    }

    #[test]
    fn mismatched_user_sets_rejected() {
        let u1 = vec![lb(0, 1.0), lb(1, 1.0)];
        let u2 = vec![lb(0, 1.0), lb(2, 1.0)];
        assert!(matches!(
            assign_two_uavs(&u1, &u2),
            Err(Error::MismatchedUserSets)
        ));
        let short = vec![lb(0, 1.0)];
        assert!(matches!(
            assign_two_uavs(&u1, &short),
            Err(Error::MismatchedUserSets)
        ));
    }

    #[test]
    fn baseline_is_seeded_and_near_equal() {
        let us = users(10);
        let a = baseline_even_grouping(&us, 4, 7).unwrap();
        let b = baseline_even_grouping(&us, 4, 7).unwrap();
        assert_eq!(a, b);
        let sizes: Vec<usize> = a.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![3, 3, 2, 2]);
        let c = baseline_even_grouping(&us, 4, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn baseline_group_membership_roughly_uniform() {
        let us = users(8);
        let k = 4;
        let mut counts = vec![vec![0usize; k]; us.len()];
        let trials = 1000;
        for seed in 0..trials {
            let groups = baseline_even_grouping(&us, k, seed).unwrap();
            for (g, ids) in groups.iter().enumerate() {
                for &id in ids {
                    counts[id][g] += 1;
                }
            }
        }
        for per_user in &counts {
            for &c in per_user {
                let freq = c as f64 / trials as f64;
                assert!((freq - 1.0 / k as f64).abs() < 0.05, "freq = {freq}");
            }
        }
    }

    #[test]
    fn two_uav_grouping_respects_half_structure() {
        let n = 10;
        let u1: Vec<LinkBudget> = (0..n).map(|id| lb(id, 1.0 + id as f64)).collect();
        let u2: Vec<LinkBudget> = (0..n).map(|id| lb(id, 1.0 + (n - id) as f64)).collect();
        let plan = two_uav_grouping(&u1, &u2, 4).unwrap();
        assert_eq!(plan.groups.len(), 4);
        for (g, ids) in plan.groups.iter().enumerate() {
            let expected_uav = usize::from(g >= 2);
            for id in ids {
                assert_eq!(plan.uav_of_user[id], expected_uav);
            }
        }
        assert!(matches!(
            two_uav_grouping(&u1, &u2, 3),
            Err(Error::OddGroupCount(3))
        ));
    }

    #[test]
    fn grouping_plan_rows_sorted_by_user() {
        let links = vec![lb(2, 3.0), lb(0, 1.0), lb(1, 2.0)];
        let plan = single_uav_grouping(&links, 3).unwrap();
        let rows = plan.rows();
        assert_eq!(rows, vec![(0, 0, 2), (1, 0, 1), (2, 0, 0)]);
    }

    proptest! {
        #[test]
        fn grouping_is_a_partition(
            gains in proptest::collection::vec(1.0e-12f64..1.0e-6, 4..60),
            k in 1usize..8,
        ) {
            prop_assume!(k <= gains.len());
            let links: Vec<LinkBudget> = gains
                .iter()
                .enumerate()
                .map(|(id, &g)| lb(id, g))
                .collect();
            let groups = group_users_by_gain(&links, k).unwrap();
            prop_assert_eq!(groups.len(), k);
            let mut all: Vec<usize> = groups.iter().flatten().copied().collect();
            all.sort_unstable();
            let expected: Vec<usize> = (0..gains.len()).collect();
            prop_assert_eq!(all, expected);
            let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
            let max = sizes.iter().max().unwrap();
            let min = sizes.iter().min().unwrap();
            prop_assert!(max - min <= 1);
        }

        #[test]
        fn assignment_invariant_under_joint_shift(
            raw in proptest::collection::vec((1u32..1_000_000, 1u32..1_000_000), 2..40),
            shift in 0u32..1_000_000,
        ) {
            // Integer-valued gains keep the arithmetic exact under shifts.
            let u1: Vec<LinkBudget> = raw
                .iter()
                .enumerate()
                .map(|(id, &(g1, _))| lb(id, f64::from(g1)))
                .collect();
            let u2: Vec<LinkBudget> = raw
                .iter()
                .enumerate()
                .map(|(id, &(_, g2))| lb(id, f64::from(g2)))
                .collect();
            let shifted = |links: &[LinkBudget]| -> Vec<LinkBudget> {
                links
                    .iter()
                    .map(|l| LinkBudget {
                        gain_linear: l.gain_linear + f64::from(shift),
                        ..*l
                    })
                    .collect()
            };
            let base = assign_two_uavs(&u1, &u2).unwrap();
            let moved = assign_two_uavs(&shifted(&u1), &shifted(&u2)).unwrap();
            prop_assert_eq!(base, moved);
        }

        #[test]
        fn half_split_counts(n in 2usize..50) {
            let u1: Vec<LinkBudget> = (0..n).map(|id| lb(id, 1.0 + id as f64)).collect();
            let u2: Vec<LinkBudget> = (0..n).map(|id| lb(id, 2.0)).collect();
            let map = assign_two_uavs(&u1, &u2).unwrap();
            let first = map.values().filter(|&&v| v == 0).count();
            let second = map.values().filter(|&&v| v == 1).count();
            prop_assert_eq!(first, n.div_ceil(2));
            prop_assert_eq!(first + second, n);
            prop_assert!(first - second <= 1);
        }
    }
}
