//! Problem files and canonical output. All numbers are exact rationals
//! written as strings; object keys come out sorted, so equal values always
//! serialize to equal bytes.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fisolve::FISpec;
use crate::gpi::{basic_nonstandard_fi, rat_grid_from_strings};
use crate::symmat::PolyMatrix;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Problem {
    /// A functional identity given by coordinate matrices.
    Fi(FISpec),
    /// `Σ_k F_k x_k = 0` from the basic nonstandard family with constant
    /// matrices `a_1, …, a_{n+1}`.
    Nonstandard { n: usize, a: Vec<Vec<Vec<String>>> },
    /// An `r`-linear map `t` in groups `1..=r`, whose trace is to be put in
    /// standard form.
    Trace { n: usize, r: usize, t: PolyMatrix },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub schema: u32,
    #[serde(flatten)]
    pub problem: Problem,
}

impl ProblemFile {
    pub fn new(problem: Problem) -> Self {
        ProblemFile {
            schema: SCHEMA_VERSION,
            problem,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let pf: ProblemFile = serde_json::from_str(text)?;
        if pf.schema != SCHEMA_VERSION {
            return Err(Error::Malformed(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                pf.schema
            )));
        }
        Ok(pf)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

impl Problem {
    /// The identity described by an `fi` or `nonstandard` problem.
    pub fn to_fi(&self) -> Result<FISpec> {
        match self {
            Problem::Fi(spec) => {
                spec.validate()?;
                Ok(spec.clone())
            }
            Problem::Nonstandard { n, a } => {
                let mats = a
                    .iter()
                    .map(|g| rat_grid_from_strings(g))
                    .collect::<Result<Vec<_>>>()?;
                FISpec::left(*n, basic_nonstandard_fi(*n, &mats)?)
            }
            Problem::Trace { .. } => Err(Error::Malformed(
                "expected an identity, found a trace problem".into(),
            )),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Malformed(format!("not a file path: {}", path.display())))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let a = vec![vec![vec!["1".to_string(), "0".into()], vec!["0".into(), "1".into()]]; 3];
        let pf = ProblemFile::new(Problem::Nonstandard { n: 2, a });
        let text = to_canonical_json(&pf).unwrap();
        let back = ProblemFile::parse(&text).unwrap();
        assert_eq!(back, pf);
        assert_eq!(to_canonical_json(&back).unwrap(), text);
        let spec = back.problem.to_fi().unwrap();
        assert!(crate::fisolve::check_fi(&spec).unwrap().holds);

        let fi = ProblemFile::new(Problem::Fi(spec));
        let text = to_canonical_json(&fi).unwrap();
        assert!(text.contains("\"kind\": \"fi\""));
        assert_eq!(ProblemFile::parse(&text).unwrap(), fi);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ProblemFile::parse("{"), Err(Error::Json(_))));
        let wrong = r#"{"schema": 2, "kind": "trace", "n": 1, "r": 0, "t": [[[]]]}"#;
        assert!(matches!(ProblemFile::parse(wrong), Err(Error::Malformed(_))));
        let ok = r#"{"schema": 1, "kind": "trace", "n": 1, "r": 0, "t": [[[{"coeff": "1", "vars": []}]]]}"#;
        assert!(ProblemFile::parse(ok).is_ok());
    }

    #[test]
    fn atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        write_atomic(&p, "a\n").unwrap();
        write_atomic(&p, "b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "b\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
