//! Locating dataset files, with synthetic stand-ins when they are absent.

use std::env;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::ratings::{load_jester, load_movielens, RatingMatrix};
use crate::synthetic::{write_jester_like, write_movielens_like, SyntheticSpec};

/// Environment variable naming the default data directory.
pub const DATA_DIR_ENV: &str = "SINKMECH_DATA_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dataset {
    MovieLens,
    Jester,
}

impl Dataset {
    pub fn label(self) -> &'static str {
        match self {
            Dataset::MovieLens => "movielens",
            Dataset::Jester => "jester",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "movielens" => Ok(Dataset::MovieLens),
            "jester" => Ok(Dataset::Jester),
            other => Err(Error::Argument(format!("unknown dataset {other:?}; use movielens or jester"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Files(Vec<PathBuf>),
    Synthetic(PathBuf),
}

pub fn data_dir_from_env() -> Option<PathBuf> {
    env::var_os(DATA_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

/// The dataset's files under `dir`, if present. MovieLens is looked up in
/// `ml-20m/`, `ml-latest-small/` and `dir` itself; Jester as
/// `jester-data-1.csv` in `jester/` or `dir`.
pub fn locate(dataset: Dataset, dir: &Path) -> Option<Vec<PathBuf>> {
    match dataset {
        Dataset::MovieLens => ["ml-20m", "ml-latest-small", "."].iter().find_map(|sub| {
            let base = dir.join(sub);
            let files = vec![base.join("ratings.csv"), base.join("movies.csv")];
            files.iter().all(|f| f.is_file()).then_some(files)
        }),
        Dataset::Jester => ["jester", "."].iter().find_map(|sub| {
            let file = dir.join(sub).join("jester-data-1.csv");
            file.is_file().then(|| vec![file])
        }),
    }
}

/// Loads real files from `data_dir` when they exist there; otherwise
/// writes the synthetic stand-in into `scratch` and loads that.
pub fn load_dataset(
    dataset: Dataset,
    data_dir: Option<&Path>,
    genre: Option<&str>,
    scratch: &Path,
) -> Result<(RatingMatrix, Source)> {
    if let Some(files) = data_dir.and_then(|d| locate(dataset, d)) {
        let matrix = match dataset {
            Dataset::MovieLens => load_movielens(&files[0], &files[1], genre)?,
            Dataset::Jester => load_jester(&files[0])?,
        };
        return Ok((matrix, Source::Files(files)));
    }
    let matrix = match dataset {
        Dataset::MovieLens => {
            let (r, m) = write_movielens_like(&scratch.join("movielens"), &SyntheticSpec::movielens_default())?;
            load_movielens(&r, &m, genre)?
        }
        Dataset::Jester => {
            let path = scratch.join("jester").join("jester-data-1.csv");
            write_jester_like(&path, &SyntheticSpec::jester_default())?;
            load_jester(&path)?
        }
    };
    Ok((matrix, Source::Synthetic(scratch.to_path_buf())))
}
