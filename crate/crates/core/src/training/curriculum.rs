use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::filter::{cheb_apply, ChebyshevFilter};
use crate::graph::ScaledLaplacian;
use crate::signal::{norm, BeliefVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurriculumStage {
    pub epoch_start: usize,
    pub active_order: usize,
}

/// Order unlocked per epoch: coefficients `0..=active_order` train, the
/// rest stay frozen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<CurriculumStage>", into = "Vec<CurriculumStage>")]
pub struct CurriculumSchedule {
    stages: Vec<CurriculumStage>,
}

impl CurriculumSchedule {
    pub fn new(stages: Vec<CurriculumStage>) -> Result<Self> {
        if stages.is_empty() {
            return Err(invalid("curriculum needs at least one stage"));
        }
        for w in stages.windows(2) {
            if w[1].epoch_start <= w[0].epoch_start {
                return Err(invalid("curriculum epoch starts must be strictly increasing"));
            }
            if w[1].active_order < w[0].active_order {
                return Err(invalid("curriculum orders must be non-decreasing"));
            }
        }
        Ok(Self { stages })
    }

    /// Everything active from epoch 0.
    pub fn full(order: usize) -> Self {
        Self {
            stages: vec![CurriculumStage {
                epoch_start: 0,
                active_order: order,
            }],
        }
    }

    /// `stages` equal steps from order `start` to `order`, one every `every` epochs.
    pub fn linear(start: usize, order: usize, every: usize, stages: usize) -> Result<Self> {
        if start > order || every == 0 || stages == 0 {
            return Err(invalid("linear curriculum needs start <= order, every >= 1, stages >= 1"));
        }
        let steps = stages.max(1);
        let list = (0..=steps)
            .map(|s| CurriculumStage {
                epoch_start: s * every,
                active_order: start + (order - start) * s / steps,
            })
            .collect();
        Self::new(list)
    }

    pub fn stages(&self) -> &[CurriculumStage] {
        &self.stages
    }

    pub fn final_order(&self) -> usize {
        self.stages.last().unwrap().active_order
    }

    /// Checks that the last stage unlocks order `k`.
    pub fn check_reaches(&self, k: usize) -> Result<()> {
        if self.final_order() < k {
            return Err(invalid(format!(
                "curriculum ends at order {} but the model has order {k}",
                self.final_order()
            )));
        }
        Ok(())
    }

    /// Order unlocked at `epoch`; epochs before the first stage use it too.
    pub fn active_order(&self, epoch: usize) -> usize {
        self.stages
            .iter()
            .rev()
            .find(|s| s.epoch_start <= epoch)
            .unwrap_or(&self.stages[0])
            .active_order
    }
}

impl TryFrom<Vec<CurriculumStage>> for CurriculumSchedule {
    type Error = crate::Error;

    fn try_from(v: Vec<CurriculumStage>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CurriculumSchedule> for Vec<CurriculumStage> {
    fn from(s: CurriculumSchedule) -> Self {
        s.stages
    }
}

pub fn curriculum_mask(schedule: &CurriculumSchedule, epoch: usize, k: usize) -> Vec<bool> {
    let active = schedule.active_order(epoch);
    (0..=k).map(|i| i <= active).collect()
}

/// Piecewise-constant map from difficulty to `(K, B)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationConfig {
    pub k_min: usize,
    pub k_max: usize,
    pub b_max: usize,
    pub thresholds: Vec<f64>,
}

impl Default for AllocationConfig {
    fn default() -> Self {
        Self {
            k_min: 4,
            k_max: 16,
            b_max: 3,
            thresholds: vec![0.01, 0.05, 0.2],
        }
    }
}

impl AllocationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_min > self.k_max || self.b_max == 0 || self.thresholds.is_empty() {
            return Err(invalid("allocation needs k_min <= k_max, b_max >= 1 and at least one threshold"));
        }
        if self.thresholds.iter().any(|t| !t.is_finite()) || self.thresholds.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("allocation thresholds must be finite and strictly increasing"));
        }
        Ok(())
    }
}

/// Level `s` = number of thresholds at or below `difficulty`; `K` and `B`
/// interpolate linearly in `s` from `(k_min, 1)` to `(k_max, b_max)`.
pub fn dynamic_allocate(difficulty: f64, config: &AllocationConfig) -> Result<(usize, usize)> {
    config.validate()?;
    if !(difficulty >= 0.0) {
        return Err(invalid(format!("difficulty must be non-negative, got {difficulty}")));
    }
    let levels = config.thresholds.len();
    let s = config.thresholds.iter().filter(|&&t| difficulty >= t).count();
    let k = config.k_min + ((config.k_max - config.k_min) * s + levels / 2) / levels;
    let b = 1 + ((config.b_max - 1) * s + levels / 2) / levels;
    Ok((k, b))
}

/// `‖y_{k_min} − y_{2 k_min}‖ / ‖y_{2 k_min}‖` using truncations of `f`.
pub fn allocation_difficulty(f: &ChebyshevFilter, lt: &ScaledLaplacian, x: &BeliefVector, k_min: usize) -> Result<f64> {
    let lo = cheb_apply(&f.truncated(k_min), lt, x, false)?.0;
    let hi = cheb_apply(&f.truncated(2 * k_min), lt, x, false)?.0;
    let denom = hi.norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    let diff: Vec<f64> = lo.as_slice().iter().zip(hi.as_slice()).map(|(a, b)| a - b).collect();
    Ok(norm(&diff) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stage(epoch_start: usize, active_order: usize) -> CurriculumStage {
        CurriculumStage {
            epoch_start,
            active_order,
        }
    }

    #[test]
    fn mask_examples() {
        let s = CurriculumSchedule::new(vec![stage(5, 2), stage(10, 5), stage(20, 8)]).unwrap();
        assert_eq!(curriculum_mask(&s, 0, 8), vec![true, true, true, false, false, false, false, false, false]);
        assert_eq!(curriculum_mask(&s, 12, 8).iter().filter(|m| **m).count(), 6);
        assert!(curriculum_mask(&s, 25, 8).iter().all(|m| *m));
        assert!(s.check_reaches(8).is_ok() && s.check_reaches(9).is_err());
    }

    #[test]
    fn schedule_validation() {
        assert!(CurriculumSchedule::new(vec![]).is_err());
        assert!(CurriculumSchedule::new(vec![stage(0, 2), stage(0, 3)]).is_err());
        assert!(CurriculumSchedule::new(vec![stage(0, 3), stage(4, 2)]).is_err());
        let lin = CurriculumSchedule::linear(2, 8, 10, 3).unwrap();
        assert_eq!(lin.stages(), &[stage(0, 2), stage(10, 4), stage(20, 6), stage(30, 8)]);
    }

    #[test]
    fn allocation_ends() {
        let c = AllocationConfig::default();
        assert_eq!(dynamic_allocate(0.0, &c).unwrap(), (4, 1));
        assert_eq!(dynamic_allocate(10.0, &c).unwrap(), (16, 3));
        let mut prev = (0, 0);
        for i in 0..400 {
            let cur = dynamic_allocate(i as f64 * 1e-3, &c).unwrap();
            assert!(cur.0 >= prev.0 && cur.1 >= prev.1);
            prev = cur;
        }
        assert!(dynamic_allocate(
            0.0,
            &AllocationConfig {
                thresholds: vec![0.2, 0.1],
                ..c
            }
        )
        .is_err());
    }
}
