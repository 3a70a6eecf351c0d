//! Parsing of dimension lists: `5`, `2,4,8`, `3..1000`, `2..1024 step 2x`.

use std::str::FromStr;

use crate::CliError;

/// Largest dimension any command accepts.
pub const MAX_DIM: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dims(pub Vec<usize>);

fn parse_usize(s: &str) -> Result<usize, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::InvalidRange(format!("not a positive integer: {s:?}")))
}

impl FromStr for Dims {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        let dims = if let Some((lo, rest)) = s.split_once("..") {
            let (hi, step) = match rest.split_once("step") {
                Some((hi, step)) => (hi, Some(step.trim())),
                None => (rest, None),
            };
            let (lo, hi) = (parse_usize(lo)?, parse_usize(hi)?);
            if lo > hi {
                return Err(CliError::InvalidRange(format!("empty range {lo}..{hi}")));
            }
            match step {
                None => (lo..=hi).collect(),
                Some(step) => {
                    if let Some(factor) = step.strip_suffix('x') {
                        let factor = parse_usize(factor)?;
                        if factor < 2 || lo == 0 {
                            return Err(CliError::InvalidRange(format!("bad geometric step in {s:?}")));
                        }
                        std::iter::successors(Some(lo), |&d| d.checked_mul(factor))
                            .take_while(|&d| d <= hi)
                            .collect()
                    } else {
                        let step = parse_usize(step)?;
                        if step == 0 {
                            return Err(CliError::InvalidRange("step must be positive".into()));
                        }
                        (lo..=hi).step_by(step).collect()
                    }
                }
            }
        } else {
            s.split(',').map(parse_usize).collect::<Result<Vec<_>, _>>()?
        };
        Ok(Dims(dims))
    }
}

impl Dims {
    /// Checks every entry lies in `2..=max`.
    pub fn validate(&self, max: usize) -> Result<(), CliError> {
        if self.0.is_empty() {
            return Err(CliError::InvalidRange("no dimensions given".into()));
        }
        if let Some(d) = self.0.iter().find(|&&d| d < 2 || d > max) {
            return Err(CliError::InvalidRange(format!("dimension {d} outside 2..={max}")));
        }
        Ok(())
    }
}
