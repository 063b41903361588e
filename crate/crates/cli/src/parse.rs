//! Arrangement files.
//!
//! ```text
//! # comment
//! name = squares
//! rank = 2
//! char = [2,0] ; 0
//! char = [1,-1] ; 1/2
//! ```
//!
//! A constant `p/q` stands for `e^{2πi p/q}` and is reduced into `[0, 1)`.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;
use toric_wonderful::arrangement::Arrangement;
use toric_wonderful::lattice::{format_vector, IntVector, TorsionValue};
use toric_wonderful::Error as CoreError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterLine {
    pub line: usize,
    pub lambda: IntVector,
    pub constant: TorsionValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangementFile {
    pub name: Option<String>,
    pub rank: usize,
    pub characters: Vec<CharacterLine>,
}

/// A failure turning a parsed file into an arrangement, located in the file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("line {line}: character {character} is not primitive (gcd {gcd}); drop --no-normalize to split it")]
    NotPrimitive {
        line: usize,
        character: String,
        gcd: String,
    },
    #[error("{0}")]
    Core(CoreError),
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            (!q.is_zero()).then(|| BigRational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

fn parse_vector(s: &str, line: usize) -> Result<IntVector, ParseError> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| err(line, format!("expected a vector like [1,-1], found `{}`", s.trim())))?;
    if inner.trim().is_empty() {
        return Err(err(line, "empty vector"));
    }
    inner
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<BigInt>()
                .map_err(|_| err(line, format!("`{}` is not an integer", x.trim())))
        })
        .collect()
}

fn parse_character(value: &str, line: usize) -> Result<CharacterLine, ParseError> {
    let (vector, constant) = value
        .split_once(';')
        .ok_or_else(|| err(line, "expected `char = [c1,...,cn] ; p/q`"))?;
    let lambda = parse_vector(vector, line)?;
    if lambda.iter().all(Zero::is_zero) {
        return Err(err(line, "zero character"));
    }
    let r = parse_rational(constant)
        .ok_or_else(|| err(line, format!("`{}` is not a fraction p/q", constant.trim())))?;
    Ok(CharacterLine {
        line,
        lambda,
        constant: TorsionValue::from_ratio(r),
    })
}

impl ArrangementFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut name = None;
        let mut rank: Option<(usize, usize)> = None;
        let mut characters = Vec::new();
        let mut last = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            last = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `key = value`, found `{content}`")))?;
            match key.trim() {
                "name" => name = Some(value.trim().to_string()),
                "rank" => {
                    if rank.is_some() {
                        return Err(err(line, "rank declared twice"));
                    }
                    let n: usize = value
                        .trim()
                        .parse()
                        .map_err(|_| err(line, format!("`{}` is not a rank", value.trim())))?;
                    if n == 0 {
                        return Err(err(line, "rank must be positive"));
                    }
                    rank = Some((n, line));
                }
                "char" => characters.push(parse_character(value, line)?),
                other => return Err(err(line, format!("unknown key `{other}`"))),
            }
        }
        let eof = last + 1;
        let (rank, _) = rank.ok_or_else(|| err(eof, "missing `rank = n`"))?;
        if characters.is_empty() {
            return Err(err(eof, "no characters declared"));
        }
        if let Some(c) = characters.iter().find(|c| c.lambda.len() != rank) {
            return Err(err(
                c.line,
                format!("character has {} entries but the rank is {rank}", c.lambda.len()),
            ));
        }
        Ok(Self {
            name,
            rank,
            characters,
        })
    }

    pub fn read(path: &Path) -> Result<Self, ParseError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(0, format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Normalizes, or with `strict` rejects the first non-primitive character.
    pub fn build(&self, strict: bool) -> Result<Arrangement, BuildError> {
        let raw: Vec<(IntVector, TorsionValue)> = self
            .characters
            .iter()
            .map(|c| (c.lambda.clone(), c.constant.clone()))
            .collect();
        let built = if strict {
            Arrangement::from_primitive(self.rank, &raw)
        } else {
            Arrangement::normalize(self.rank, &raw)
        };
        built.map_err(|e| match e {
            CoreError::NotPrimitive { index, gcd, .. } => {
                let c = &self.characters[index];
                BuildError::NotPrimitive {
                    line: c.line,
                    character: format!("{} ; {}", format_vector(&c.lambda), c.constant),
                    gcd,
                }
            }
            other => BuildError::Core(other),
        })
    }
}

impl fmt::Display for ArrangementFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            writeln!(f, "name = {name}")?;
        }
        writeln!(f, "rank = {}", self.rank)?;
        for c in &self.characters {
            writeln!(f, "char = {} ; {}", format_vector(&c.lambda), c.constant)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARES: &str = "# four characters\nname = squares\nrank = 2\nchar = [2,0] ; 0\nchar = [0,2] ; 0\nchar = [1,1] ; 0\nchar = [1,-1] ; 0\n";

    #[test]
    fn squares_normalize_to_six() {
        let file = ArrangementFile::parse(SQUARES).unwrap();
        assert_eq!(file.name.as_deref(), Some("squares"));
        assert_eq!(file.characters.len(), 4);
        assert_eq!(file.build(false).unwrap().characters().len(), 6);
    }

    #[test]
    fn empty_file_is_an_error() {
        assert_eq!(ArrangementFile::parse("").unwrap_err().line, 1);
        assert!(ArrangementFile::parse("# nothing\n").is_err());
    }

    #[test]
    fn located_errors() {
        let e = ArrangementFile::parse("rank = 2\nchar = [1,0,0] ; 0\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = ArrangementFile::parse("rank = 2\nchar = [0,0] ; 0\n").unwrap_err();
        assert_eq!((e.line, e.message.as_str()), (2, "zero character"));
        let e = ArrangementFile::parse("rank = 2\nchar = [1,0] ; 1/0\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = ArrangementFile::parse("rank = 2\nchar = [1,0]\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = ArrangementFile::parse("rank = 2\nrank = 2\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = ArrangementFile::parse("rank = 2\nfoo = 1\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn unreduced_constants_are_normalized() {
        let file = ArrangementFile::parse("rank = 1\nchar = [1] ; 6/4\n").unwrap();
        assert_eq!(file.characters[0].constant, TorsionValue::new(1, 2).unwrap());
        let file = ArrangementFile::parse("rank = 1\nchar = [1] ; -1/3\n").unwrap();
        assert_eq!(file.characters[0].constant, TorsionValue::new(2, 3).unwrap());
    }

    #[test]
    fn serialization_round_trips() {
        let file = ArrangementFile::parse("rank = 2 # torus\nchar = [ 1, 1 ] ; 3/2\nchar=[1,-1];0\n").unwrap();
        let text = file.to_string();
        let again = ArrangementFile::parse(&text).unwrap();
        assert_eq!(again.to_string(), text);
        assert_eq!(again.rank, file.rank);
        let strip = |f: &ArrangementFile| -> Vec<(IntVector, TorsionValue)> {
            f.characters.iter().map(|c| (c.lambda.clone(), c.constant.clone())).collect()
        };
        assert_eq!(strip(&again), strip(&file));
    }

    #[test]
    fn strict_build_cites_the_character() {
        let file = ArrangementFile::parse(SQUARES).unwrap();
        let e = file.build(true).unwrap_err();
        assert_eq!(
            e,
            BuildError::NotPrimitive {
                line: 4,
                character: "[2,0] ; 0".into(),
                gcd: "2".into()
            }
        );
    }

    #[test]
    fn infinite_index_is_reported() {
        let file = ArrangementFile::parse("rank = 2\nchar = [1,0] ; 0\n").unwrap();
        assert!(matches!(
            file.build(false),
            Err(BuildError::Core(CoreError::InfiniteIndex { .. }))
        ));
    }
}
