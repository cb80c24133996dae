use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Labels, Split};

/// How the training set is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMode {
    /// `k` nodes of every class.
    PerClass(usize),
    /// A uniformly random fraction of all nodes.
    Fraction(f64),
}

/// Validation size, drawn from the nodes left after training.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValSize {
    /// `min(500, floor(remainder / 4))`.
    #[default]
    Default,
    Count(usize),
    Fraction(f64),
}

impl std::str::FromStr for SplitMode {
    type Err = Error;

    /// `per-class:<k>` or `fraction:<f>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad split mode {s:?}"));
        match s.split_once(':') {
            Some(("per-class", k)) => Ok(Self::PerClass(k.parse().map_err(|_| bad())?)),
            Some(("fraction", f)) => {
                let f: f64 = f.parse().map_err(|_| bad())?;
                if f > 0.0 && f < 1.0 {
                    Ok(Self::Fraction(f))
                } else {
                    Err(bad())
                }
            }
            _ => Err(bad()),
        }
    }
}

impl std::str::FromStr for ValSize {
    type Err = Error;

    /// `default`, a node count, or a fraction of the remainder (contains `.`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad validation size {s:?}"));
        if s == "default" {
            Ok(Self::Default)
        } else if s.contains('.') {
            Ok(Self::Fraction(s.parse().map_err(|_| bad())?))
        } else {
            Ok(Self::Count(s.parse().map_err(|_| bad())?))
        }
    }
}

impl ValSize {
    fn resolve(self, remainder: usize) -> Result<usize> {
        Ok(match self {
            Self::Default => 500.min(remainder / 4),
            Self::Count(k) => {
                if k > remainder {
                    return Err(Error::InvalidParameter(format!(
                        "validation size {k} exceeds the {remainder} remaining nodes"
                    )));
                }
                k
            }
            Self::Fraction(f) => {
                if !(0.0..=1.0).contains(&f) {
                    return Err(Error::InvalidParameter(format!("validation fraction {f}")));
                }
                (f * remainder as f64).floor() as usize
            }
        })
    }
}

pub fn make_split<R: Rng + ?Sized>(
    y: &Labels,
    mode: SplitMode,
    val: ValSize,
    rng: &mut R,
) -> Result<Split> {
    let n = y.len();
    let mut train = match mode {
        SplitMode::PerClass(k) => {
            if k == 0 {
                return Err(Error::InvalidParameter(
                    "per-class count must be positive".into(),
                ));
            }
            let mut members = vec![Vec::new(); y.class_count()];
            for v in 0..n {
                members[y.get(v)].push(v);
            }
            let mut train = Vec::with_capacity(k * members.len());
            for (class, nodes) in members.iter_mut().enumerate() {
                if nodes.len() < k {
                    return Err(Error::ClassTooSmall {
                        class,
                        available: nodes.len(),
                        requested: k,
                    });
                }
                nodes.shuffle(rng);
                train.extend_from_slice(&nodes[..k]);
            }
            train
        }
        SplitMode::Fraction(f) => {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "training fraction {f} outside (0, 1)"
                )));
            }
            let count = ((f * n as f64).round() as usize).clamp(1, n);
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(rng);
            all.truncate(count);
            all
        }
    };
    train.sort_unstable();
    let mut in_train = vec![false; n];
    for &v in &train {
        in_train[v] = true;
    }
    let mut rest: Vec<usize> = (0..n).filter(|&v| !in_train[v]).collect();
    rest.shuffle(rng);
    let val_count = val.resolve(rest.len())?;
    let mut validation = rest[..val_count].to_vec();
    let mut test = rest[val_count..].to_vec();
    validation.sort_unstable();
    test.sort_unstable();
    Split::new(train, validation, test, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn per_class_counts() {
        let y = Labels::new((0..30).map(|v| v % 3).collect(), 3).unwrap();
        let s = make_split(
            &y,
            SplitMode::PerClass(2),
            ValSize::Default,
            &mut RngStream::from_seed(1).rng(),
        )
        .unwrap();
        assert_eq!(s.train.len(), 6);
        for c in 0..3 {
            assert_eq!(s.train.iter().filter(|&&v| y.get(v) == c).count(), 2);
        }
        assert_eq!(s.validation.len(), 6);
        assert_eq!(s.train.len() + s.validation.len() + s.test.len(), 30);
    }

    #[test]
    fn fraction_counts() {
        let y = Labels::new((0..1000).map(|v| v % 4).collect(), 4).unwrap();
        let s = make_split(
            &y,
            SplitMode::Fraction(0.1),
            ValSize::Default,
            &mut RngStream::from_seed(2).rng(),
        )
        .unwrap();
        assert_eq!(s.train.len(), 100);
        assert_eq!(s.validation.len(), 225);
        let s = make_split(
            &y,
            SplitMode::Fraction(0.1),
            ValSize::Count(50),
            &mut RngStream::from_seed(2).rng(),
        )
        .unwrap();
        assert_eq!(s.validation.len(), 50);
    }

    #[test]
    fn default_validation_caps_at_500() {
        let y = Labels::new((0..5000).map(|v| v % 2).collect(), 2).unwrap();
        let s = make_split(
            &y,
            SplitMode::PerClass(20),
            ValSize::Default,
            &mut RngStream::from_seed(0).rng(),
        )
        .unwrap();
        assert_eq!(s.validation.len(), 500);
    }

    #[test]
    fn class_too_small() {
        let mut values = vec![0; 30];
        values.extend(vec![1; 10]);
        let y = Labels::new(values, 2).unwrap();
        let err = make_split(
            &y,
            SplitMode::PerClass(20),
            ValSize::Default,
            &mut RngStream::from_seed(0).rng(),
        );
        assert!(matches!(
            err,
            Err(Error::ClassTooSmall {
                class: 1,
                available: 10,
                requested: 20
            })
        ));
    }

    #[test]
    fn reproducible() {
        let y = Labels::new((0..200).map(|v| v % 5).collect(), 5).unwrap();
        let a = make_split(
            &y,
            SplitMode::PerClass(3),
            ValSize::Default,
            &mut RngStream::from_seed(7).rng(),
        );
        let b = make_split(
            &y,
            SplitMode::PerClass(3),
            ValSize::Default,
            &mut RngStream::from_seed(7).rng(),
        );
        assert_eq!(a.unwrap(), b.unwrap());
    }

    #[test]
    fn parses_cli_spellings() {
        assert_eq!(
            "per-class:20".parse::<SplitMode>().unwrap(),
            SplitMode::PerClass(20)
        );
        assert_eq!(
            "fraction:0.1".parse::<SplitMode>().unwrap(),
            SplitMode::Fraction(0.1)
        );
        assert!("fraction:1.5".parse::<SplitMode>().is_err());
        assert!("random".parse::<SplitMode>().is_err());
        assert_eq!("default".parse::<ValSize>().unwrap(), ValSize::Default);
        assert_eq!("300".parse::<ValSize>().unwrap(), ValSize::Count(300));
        assert_eq!("0.25".parse::<ValSize>().unwrap(), ValSize::Fraction(0.25));
    }
}
