//! Seeded stand-ins for the MovieLens and Jester files.
//!
//! Ratings follow a low-rank taste model: a per-item quality, a per-user
//! bias, a three-factor user-item affinity and noise, rounded to the
//! dataset's resolution and clipped to its scale. Each user rates a random
//! subset of items. The files use the real formats, so they exercise the
//! same loaders.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::ratings::{format_ticks, JESTER_MISSING, JESTER_SCALE, MOVIELENS_SCALE, TICK};

const GENRES: [&str; 8] = ["Action", "Comedy", "Drama", "Romance", "Thriller", "Sci-Fi", "Animation", "Documentary"];
const FACTORS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub users: usize,
    pub items: usize,
    /// Expected fraction of the matrix that is rated.
    pub density: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn movielens_default() -> Self {
        Self {
            users: 6000,
            items: 120,
            density: 0.3,
            seed: 20,
        }
    }

    pub fn jester_default() -> Self {
        Self {
            users: 8000,
            items: 100,
            density: 0.55,
            seed: 1,
        }
    }
}

/// Deviations in rating points. `factor` is the spread of each latent
/// coordinate; the affinity's spread is `√3·factor²`.
struct TasteParams {
    centre: f64,
    quality: f64,
    bias: f64,
    factor: f64,
    noise: f64,
}

/// Overall spread about one star, items differing by about half a star.
const MOVIELENS_TASTE: TasteParams = TasteParams {
    centre: 3.5,
    quality: 0.45,
    bias: 0.4,
    factor: 0.51,
    noise: 0.6,
};

/// Overall spread about five points on the twenty-point scale.
const JESTER_TASTE: TasteParams = TasteParams {
    centre: 0.9,
    quality: 1.5,
    bias: 1.3,
    factor: 1.07,
    noise: 4.0,
};

struct Taste {
    centre: f64,
    quality: Vec<f64>,
    bias: Vec<f64>,
    user_f: Vec<[f64; FACTORS]>,
    item_f: Vec<[f64; FACTORS]>,
    noise: Normal<f64>,
}

impl Taste {
    fn draw(spec: &SyntheticSpec, p: &TasteParams, rng: &mut ChaCha8Rng) -> Self {
        let n = |s: f64| Normal::new(0.0, s).expect("positive deviation");
        let (q, b, f) = (n(p.quality), n(p.bias), n(p.factor));
        let mut factors = |count: usize| -> Vec<[f64; FACTORS]> {
            (0..count).map(|_| std::array::from_fn(|_| f.sample(rng))).collect()
        };
        let user_f = factors(spec.users);
        let item_f = factors(spec.items);
        Self {
            centre: p.centre,
            quality: (0..spec.items).map(|_| q.sample(rng)).collect(),
            bias: (0..spec.users).map(|_| b.sample(rng)).collect(),
            user_f,
            item_f,
            noise: n(p.noise),
        }
    }

    fn rating(&self, u: usize, i: usize, rng: &mut ChaCha8Rng) -> f64 {
        let affinity: f64 = (0..FACTORS).map(|k| self.user_f[u][k] * self.item_f[i][k]).sum();
        self.centre + self.quality[i] + self.bias[u] + affinity + self.noise.sample(rng)
    }
}

/// Rounds to a multiple of `step` ticks and clips to `scale`.
fn quantize(x: f64, step: i64, scale: (i64, i64)) -> i64 {
    let t = (x * TICK as f64 / step as f64).round() as i64 * step;
    t.clamp(scale.0, scale.1)
}

fn check(spec: &SyntheticSpec) -> Result<()> {
    if spec.users == 0 || spec.items < 2 || !(spec.density > 0.0 && spec.density <= 1.0) {
        return Err(Error::Argument(format!("unusable synthetic spec {spec:?}")));
    }
    Ok(())
}

/// `(ratings.csv, movies.csv)` contents on the half-star scale.
pub fn movielens_like(spec: &SyntheticSpec) -> Result<(String, String)> {
    check(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let taste = Taste::draw(spec, &MOVIELENS_TASTE, &mut rng);
    let mut movies = String::from("movieId,title,genres\n");
    for i in 0..spec.items {
        let count = rng.gen_range(1..=3);
        let genres: Vec<&str> = GENRES.choose_multiple(&mut rng, count).copied().collect();
        writeln!(movies, "{},\"Film {}, Part {}\",{}", i + 1, i + 1, i % 3 + 1, genres.join("|")).unwrap();
    }
    let mut ratings = String::from("userId,movieId,rating,timestamp\n");
    for u in 0..spec.users {
        for i in 0..spec.items {
            if rng.gen::<f64>() >= spec.density {
                continue;
            }
            let r = quantize(taste.rating(u, i, &mut rng), TICK / 2, MOVIELENS_SCALE);
            let stamp = 1_000_000_000 + rng.gen_range(0..400_000_000u64);
            writeln!(ratings, "{},{},{},{stamp}", u + 1, i + 1, format_ticks(r)).unwrap();
        }
    }
    Ok((ratings, movies))
}

/// Jester matrix text: count column, then one field per joke, `99` if unrated.
pub fn jester_like(spec: &SyntheticSpec) -> Result<String> {
    check(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let taste = Taste::draw(spec, &JESTER_TASTE, &mut rng);
    let mut out = String::new();
    for u in 0..spec.users {
        let row: Vec<String> = (0..spec.items)
            .map(|i| {
                let r = quantize(taste.rating(u, i, &mut rng), TICK / 100, JESTER_SCALE);
                if rng.gen::<f64>() < spec.density {
                    format_ticks(r)
                } else {
                    JESTER_MISSING.to_owned()
                }
            })
            .collect();
        let count = row.iter().filter(|f| *f != JESTER_MISSING).count();
        writeln!(out, "{count},{}", row.join(",")).unwrap();
    }
    Ok(out)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `ratings.csv` and `movies.csv` into `dir`.
pub fn write_movielens_like(dir: &Path, spec: &SyntheticSpec) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let (ratings, movies) = movielens_like(spec)?;
    let (rp, mp) = (dir.join("ratings.csv"), dir.join("movies.csv"));
    write(&rp, &ratings)?;
    write(&mp, &movies)?;
    Ok((rp, mp))
}

pub fn write_jester_like(path: &Path, spec: &SyntheticSpec) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    write(path, &jester_like(spec)?)
}
