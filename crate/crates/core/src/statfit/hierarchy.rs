//! Hierarchy sizes `H_k` and neighbouring ratios `H_k / H_{k+1}`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Threshold convention: integer day counts use `d >= k`; real-valued
/// simulated strengths use `d > k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HierarchyMode {
    Data,
    Sim,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyProfile {
    /// `sizes[k - 1] = H_k` for `k = 1..=K`.
    pub sizes: Vec<u64>,
    pub mode: HierarchyMode,
}

pub fn hierarchy_profile(strengths: &[f64], mode: HierarchyMode, levels: usize) -> Result<HierarchyProfile> {
    if levels < 2 {
        return Err(invalid("K", format!("need K >= 2, got {levels}")));
    }
    let mut sizes = vec![0u64; levels];
    for &d in strengths {
        // Number of thresholds k in 1..=K that d clears.
        let cleared = match mode {
            HierarchyMode::Data => d.floor(),
            HierarchyMode::Sim => d.ceil() - 1.0,
        };
        if cleared >= 1.0 {
            let top = (cleared as usize).min(levels);
            for h in &mut sizes[..top] {
                *h += 1;
            }
        }
    }
    Ok(HierarchyProfile { sizes, mode })
}

/// `H_k / H_{k+1}` for `k = 1..K-1`; `None` where `H_{k+1} = 0`.
pub fn hierarchy_ratios(profile: &HierarchyProfile) -> Vec<Option<f64>> {
    profile
        .sizes
        .windows(2)
        .map(|w| (w[1] > 0).then(|| w[0] as f64 / w[1] as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(strengths: &[f64], mode: HierarchyMode, levels: usize) -> Vec<u64> {
        (1..=levels)
            .map(|k| {
                let k = k as f64;
                strengths
                    .iter()
                    .filter(|&&d| match mode {
                        HierarchyMode::Data => d >= k,
                        HierarchyMode::Sim => d > k,
                    })
                    .count() as u64
            })
            .collect()
    }

    #[test]
    fn data_mode_example() {
        let p = hierarchy_profile(&[1.0, 1.0, 2.0, 3.0, 5.0], HierarchyMode::Data, 5).unwrap();
        assert_eq!(p.sizes, vec![5, 3, 2, 1, 1]);
    }

    #[test]
    fn sim_mode_example() {
        let p = hierarchy_profile(&[1.0, 1.0, 2.0, 3.0, 5.0], HierarchyMode::Sim, 5).unwrap();
        assert_eq!(&p.sizes[..3], &[3, 2, 1]);
    }

    #[test]
    fn undefined_ratios_marked() {
        let p = hierarchy_profile(&[1.0, 2.0, 2.5], HierarchyMode::Data, 4).unwrap();
        assert_eq!(p.sizes, vec![3, 2, 0, 0]);
        assert_eq!(hierarchy_ratios(&p), vec![Some(1.5), None, None]);
    }

    #[test]
    fn empty_and_bad_levels() {
        let p = hierarchy_profile(&[], HierarchyMode::Sim, 3).unwrap();
        assert_eq!(p.sizes, vec![0, 0, 0]);
        assert!(hierarchy_profile(&[1.0], HierarchyMode::Sim, 1).is_err());
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            xs in prop::collection::vec(
                prop_oneof![1.0f64..12.0, (1u32..12).prop_map(f64::from)],
                0..50,
            ),
            levels in 2usize..14,
            sim in any::<bool>(),
        ) {
            let mode = if sim { HierarchyMode::Sim } else { HierarchyMode::Data };
            let p = hierarchy_profile(&xs, mode, levels).unwrap();
            prop_assert_eq!(&p.sizes, &brute(&xs, mode, levels));
            prop_assert!(p.sizes.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
