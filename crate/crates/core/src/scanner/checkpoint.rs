//! Versioned text checkpoints for the conjecture scan.
//!
//! ```text
//! vforge-checkpoint v1
//! n_done=1000
//! p=3 e=497
//! ...
//! crc=1a2b3c4d
//! ```
//!
//! The CRC32 covers every byte before the `crc=` line.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::factored::FactoredRational;
use crate::products::v2_of_product_h;

pub const HEADER: &str = "vforge-checkpoint v1";

/// Scan state after `n_done` indices.
///
/// Only `n_done` and the `f` product are stored; `h_v2` follows from
/// `n_done` and the running maximum is rebuilt on resume.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub n_done: u64,
    pub f_exponents: FactoredRational,
    pub h_v2: i64,
    /// Index of the largest `P(n)^(1/n)` so far, once known.
    pub running_max: Option<u64>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::CheckpointFormat(msg.into())
}

impl Checkpoint {
    pub fn new(n_done: u64, f_exponents: FactoredRational) -> Result<Self> {
        let h_v2 = if n_done == 0 {
            0
        } else {
            v2_of_product_h(n_done)?
        };
        Ok(Checkpoint {
            n_done,
            f_exponents,
            h_v2,
            running_max: None,
        })
    }

    pub fn encode(&self) -> String {
        let mut body = format!("{HEADER}\nn_done={}\n", self.n_done);
        for (p, e) in self.f_exponents.iter() {
            writeln!(body, "p={p} e={e}").unwrap();
        }
        let crc = crc32fast::hash(body.as_bytes());
        writeln!(body, "crc={crc:08x}").unwrap();
        body
    }

    pub fn decode(text: &str) -> Result<Self> {
        let body_end = text
            .rfind("crc=")
            .filter(|&i| i == 0 || text.as_bytes()[i - 1] == b'\n')
            .ok_or_else(|| bad("missing crc line"))?;
        let (body, crc_line) = text.split_at(body_end);
        let stored = crc_line
            .trim_end_matches('\n')
            .strip_prefix("crc=")
            .filter(|h| !h.is_empty() && h.bytes().all(|b| b.is_ascii_hexdigit()))
            .and_then(|h| u32::from_str_radix(h, 16).ok())
            .ok_or_else(|| bad("unreadable crc line"))?;
        if crc32fast::hash(body.as_bytes()) != stored {
            return Err(bad("crc mismatch"));
        }

        let mut lines = body.lines();
        if lines.next() != Some(HEADER) {
            return Err(bad("unknown header"));
        }
        let n_done = lines
            .next()
            .and_then(|l| l.strip_prefix("n_done="))
            .and_then(parse_decimal::<u64>)
            .ok_or_else(|| bad("missing n_done"))?;
        let mut pairs = Vec::new();
        let mut last = 0;
        for line in lines {
            let (p, e) = line
                .strip_prefix("p=")
                .and_then(|rest| rest.split_once(" e="))
                .and_then(|(p, e)| Some((parse_decimal::<u64>(p)?, parse_decimal::<i64>(e)?)))
                .ok_or_else(|| bad(format!("bad line {line:?}")))?;
            if p <= last || p == 2 || e == 0 {
                return Err(bad(format!("bad exponent entry {line:?}")));
            }
            last = p;
            pairs.push((p, e));
        }
        let f = FactoredRational::from_pairs(pairs).map_err(|e| bad(e.to_string()))?;
        Checkpoint::new(n_done, f)
    }

    /// Writes to a sibling temporary file and renames it into place.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = temp_path(path);
        fs::write(&tmp, self.encode())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::decode(&fs::read_to_string(path)?)
    }
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Plain decimal only: optional leading `-`, then digits.
fn parse_decimal<T: std::str::FromStr>(s: &str) -> Option<T> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Checkpoint {
        let f = FactoredRational::from_pairs([(3, 4), (5, -1), (7, 2)]).unwrap();
        Checkpoint::new(10, f).unwrap()
    }

    #[test]
    fn round_trip() {
        let cp = sample();
        let text = cp.encode();
        assert!(
            text.starts_with("vforge-checkpoint v1\nn_done=10\np=3 e=4\np=5 e=-1\np=7 e=2\ncrc=")
        );
        assert_eq!(Checkpoint::decode(&text).unwrap(), cp);
    }

    #[test]
    fn h_v2_is_rebuilt() {
        assert_eq!(sample().h_v2, v2_of_product_h(10).unwrap());
    }

    #[test]
    fn corruption_is_detected() {
        let text = sample().encode();
        let flipped = text.replace("e=4", "e=5");
        assert!(matches!(
            Checkpoint::decode(&flipped),
            Err(Error::CheckpointFormat(_))
        ));
        let truncated = &text[..text.len() - 4];
        assert!(Checkpoint::decode(truncated).is_err());
        assert!(Checkpoint::decode("").is_err());
    }

    #[test]
    fn malformed_body_with_valid_crc_is_rejected() {
        for body in [
            "vforge-checkpoint v2\nn_done=1\n",
            "vforge-checkpoint v1\nn_done=1e3\n",
            "vforge-checkpoint v1\nn_done=4\np=9 e=1\n",
            "vforge-checkpoint v1\nn_done=4\np=5 e=1\np=3 e=1\n",
            "vforge-checkpoint v1\nn_done=4\np=2 e=1\n",
        ] {
            let text = format!("{body}crc={:08x}\n", crc32fast::hash(body.as_bytes()));
            assert!(Checkpoint::decode(&text).is_err(), "{body:?}");
        }
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.ckpt");
        let cp = sample();
        cp.save(&path).unwrap();
        assert_eq!(Checkpoint::load(&path).unwrap(), cp);
        assert!(!temp_path(&path).exists());
        assert!(matches!(
            Checkpoint::load(&dir.path().join("missing")),
            Err(Error::CheckpointIo(_))
        ));
    }
}
