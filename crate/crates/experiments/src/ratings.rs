//! Sparse rating matrices, the two dataset loaders, and histogram imputation.
//!
//! Ratings are stored as integer multiples of [`TICK`] (a thousandth of a
//! point) so that every value in either dataset is represented exactly.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sinkmech::scalar::parse_rational;
use sinkmech::Rational;

use crate::error::{Error, Result};

/// Ticks per rating point.
pub const TICK: i64 = 1000;

/// The Jester marker for "not rated".
pub const JESTER_MISSING: &str = "99";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub id: String,
    pub genres: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Fill {
    seed: u64,
    /// Observed ratings per item, in ticks and sorted.
    pools: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingMatrix {
    pub users: Vec<String>,
    pub items: Vec<Item>,
    /// Rating scale `(lo, hi)` in ticks.
    pub scale: (i64, i64),
    /// Observed `(item, rating)` pairs per user, sorted by item.
    observed: Vec<Vec<(u32, i64)>>,
    fill: Option<Fill>,
}

fn ticks(text: &str) -> Option<i64> {
    let q = parse_rational(text).ok()? * Rational::from_integer(TICK.into());
    if q.is_integer() {
        q.to_integer().to_i64()
    } else {
        None
    }
}

/// Decimal text of a tick count, without trailing zeros.
pub fn format_ticks(t: i64) -> String {
    let sign = if t < 0 { "-" } else { "" };
    let (whole, frac) = (t.abs() / TICK, t.abs() % TICK);
    if frac == 0 {
        format!("{sign}{whole}")
    } else {
        let digits = format!("{frac:03}");
        format!("{sign}{whole}.{}", digits.trim_end_matches('0'))
    }
}

impl RatingMatrix {
    /// Builds a matrix from dense rows of optional tick values.
    pub fn from_dense(
        users: Vec<String>,
        items: Vec<Item>,
        scale: (i64, i64),
        rows: &[Vec<Option<i64>>],
    ) -> Result<Self> {
        if scale.0 >= scale.1 {
            return Err(Error::Argument(format!("empty rating scale {scale:?}")));
        }
        if rows.len() != users.len() {
            return Err(Error::Argument(format!("{} rows for {} users", rows.len(), users.len())));
        }
        let mut observed = Vec::with_capacity(rows.len());
        for (u, row) in rows.iter().enumerate() {
            if row.len() != items.len() {
                return Err(Error::Argument(format!("user {u} has {} entries for {} items", row.len(), items.len())));
            }
            let mut entries = Vec::new();
            for (i, r) in row.iter().enumerate() {
                if let Some(r) = *r {
                    if r < scale.0 || r > scale.1 {
                        return Err(Error::Argument(format!(
                            "rating {} outside [{}, {}]",
                            format_ticks(r),
                            format_ticks(scale.0),
                            format_ticks(scale.1)
                        )));
                    }
                    entries.push((i as u32, r));
                }
            }
            observed.push(entries);
        }
        Ok(Self {
            users,
            items,
            scale,
            observed,
            fill: None,
        })
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    pub fn num_observed(&self) -> usize {
        self.observed.iter().map(Vec::len).sum()
    }

    /// Number of ratings user `u` actually gave.
    pub fn observed_by(&self, user: usize) -> usize {
        self.observed[user].len()
    }

    pub fn observed_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.items.len()];
        for row in &self.observed {
            for &(i, _) in row {
                counts[i as usize] += 1;
            }
        }
        counts
    }

    /// True once every entry has a value, either observed or imputed.
    pub fn is_complete(&self) -> bool {
        self.fill.is_some() || self.num_observed() == self.users.len() * self.items.len()
    }

    fn observed_ticks(&self, user: usize, item: usize) -> Option<i64> {
        let row = &self.observed[user];
        row.binary_search_by_key(&(item as u32), |&(i, _)| i).ok().map(|k| row[k].1)
    }

    /// Rating in ticks; missing entries of an imputed matrix are drawn from
    /// the item's observed ratings with a generator keyed on
    /// `(seed, user, item)`, so every draw is independent and repeatable.
    pub fn rating_ticks(&self, user: usize, item: usize) -> Option<i64> {
        if let Some(r) = self.observed_ticks(user, item) {
            return Some(r);
        }
        let fill = self.fill.as_ref()?;
        let pool = &fill.pools[item];
        let mut rng = ChaCha8Rng::seed_from_u64(mix(&[fill.seed, user as u64, item as u64]));
        Some(pool[rng.gen_range(0..pool.len())])
    }

    pub fn rating(&self, user: usize, item: usize) -> Option<Rational> {
        self.rating_ticks(user, item).map(|t| Rational::new(t.into(), TICK.into()))
    }
}

/// SplitMix64 folded over `parts`; used to derive independent seeds.
pub fn mix(parts: &[u64]) -> u64 {
    let mut h = 0x9E37_79B9_7F4A_7C15u64;
    for &p in parts {
        let mut z = h ^ p.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h = z ^ (z >> 31);
    }
    h
}

/// Drops items with fewer than `min_ratings` observed entries and fills the
/// remaining gaps from each item's empirical rating distribution.
pub fn impute(matrix: &RatingMatrix, min_ratings: usize, seed: u64) -> Result<RatingMatrix> {
    let counts = matrix.observed_counts();
    let kept: Vec<usize> = (0..matrix.items.len()).filter(|&i| counts[i] >= min_ratings.max(1)).collect();
    if kept.is_empty() {
        return Err(Error::Data(format!("no item has at least {min_ratings} ratings")));
    }
    let mut remap = vec![u32::MAX; matrix.items.len()];
    for (new, &old) in kept.iter().enumerate() {
        remap[old] = new as u32;
    }
    let mut pools = vec![Vec::new(); kept.len()];
    let observed: Vec<Vec<(u32, i64)>> = matrix
        .observed
        .iter()
        .map(|row| {
            row.iter()
                .filter(|&&(i, _)| remap[i as usize] != u32::MAX)
                .map(|&(i, r)| {
                    let j = remap[i as usize];
                    pools[j as usize].push(r);
                    (j, r)
                })
                .collect()
        })
        .collect();
    for pool in &mut pools {
        pool.sort_unstable();
    }
    Ok(RatingMatrix {
        users: matrix.users.clone(),
        items: kept.iter().map(|&i| matrix.items[i].clone()).collect(),
        scale: matrix.scale,
        observed,
        fill: Some(Fill { seed, pools }),
    })
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    Ok(csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(open(path)?))
}

fn csv_line(path: &Path, e: &csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::parse(path, line, e.to_string())
}

/// MovieLens scale, half a star to five stars.
pub const MOVIELENS_SCALE: (i64, i64) = (TICK / 2, 5 * TICK);
pub const JESTER_SCALE: (i64, i64) = (-10 * TICK, 10 * TICK);

/// Reads `ratings.csv` (`userId,movieId,rating,timestamp`) and `movies.csv`
/// (`movieId,title,genres`, genres separated by `|`). With a genre, only
/// that genre's movies are kept.
pub fn load_movielens(ratings: &Path, movies: &Path, genre: Option<&str>) -> Result<RatingMatrix> {
    let mut items = Vec::new();
    let mut item_of: HashMap<String, Option<u32>> = HashMap::new();
    let mut reader = csv_reader(movies)?;
    for record in reader.records() {
        let record = record.map_err(|e| csv_line(movies, &e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 3 {
            return Err(Error::parse(movies, line, format!("expected 3 fields, found {}", record.len())));
        }
        let genres: Vec<String> = record[2].split('|').map(str::to_owned).collect();
        let keep = genre.is_none_or(|g| genres.iter().any(|x| x == g));
        let slot = keep.then(|| {
            items.push(Item {
                id: record[0].to_owned(),
                genres,
            });
            items.len() as u32 - 1
        });
        if item_of.insert(record[0].to_owned(), slot).is_some() {
            return Err(Error::parse(movies, line, format!("duplicate movie id {}", &record[0])));
        }
    }
    if let Some(g) = genre {
        if items.is_empty() {
            return Err(Error::Argument(format!("no movie has genre {g:?}")));
        }
    }

    let mut users = Vec::new();
    let mut user_of: HashMap<String, usize> = HashMap::new();
    let mut observed: Vec<Vec<(u32, i64)>> = Vec::new();
    let mut reader = csv_reader(ratings)?;
    for record in reader.records() {
        let record = record.map_err(|e| csv_line(ratings, &e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 4 {
            return Err(Error::parse(ratings, line, format!("expected 4 fields, found {}", record.len())));
        }
        let slot = *item_of
            .get(&record[1])
            .ok_or_else(|| Error::parse(ratings, line, format!("unknown movie id {}", &record[1])))?;
        let value = ticks(&record[2])
            .ok_or_else(|| Error::parse(ratings, line, format!("not a rating: {:?}", &record[2])))?;
        if value < MOVIELENS_SCALE.0 || value > MOVIELENS_SCALE.1 {
            return Err(Error::parse(ratings, line, format!("rating {} outside [0.5, 5]", &record[2])));
        }
        // Users who rated nothing in the chosen genre never appear.
        if let Some(i) = slot {
            let u = *user_of.entry(record[0].to_owned()).or_insert_with(|| {
                users.push(record[0].to_owned());
                observed.push(Vec::new());
                users.len() - 1
            });
            observed[u].push((i, value));
        }
    }
    for (u, row) in observed.iter_mut().enumerate() {
        row.sort_unstable_by_key(|&(i, _)| i);
        if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Argument(format!(
                "user {} rated movie {} twice",
                users[u],
                items[w[0].0 as usize].id
            )));
        }
    }
    Ok(RatingMatrix {
        users,
        items,
        scale: MOVIELENS_SCALE,
        observed,
        fill: None,
    })
}

/// Reads a Jester matrix: one user per line, the first field being the
/// number of jokes rated, then one field per joke with `99` for "not
/// rated". Fields may be separated by commas or whitespace.
pub fn load_jester(path: &Path) -> Result<RatingMatrix> {
    let reader = BufReader::new(open(path)?);
    let mut observed = Vec::new();
    let mut width = None;
    for (k, line) in reader.lines().enumerate() {
        let line_no = k as u64 + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.is_empty() {
            continue;
        }
        let jokes = fields.len() - 1;
        match width {
            None if jokes == 0 => return Err(Error::parse(path, line_no, "row has no ratings")),
            None => width = Some(jokes),
            Some(w) if w != jokes => {
                return Err(Error::parse(path, line_no, format!("expected {w} ratings, found {jokes}")))
            }
            Some(_) => {}
        }
        let count: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(path, line_no, format!("bad rating count {:?}", fields[0])))?;
        let mut row = Vec::new();
        for (j, f) in fields[1..].iter().enumerate() {
            if *f == JESTER_MISSING {
                continue;
            }
            let value = ticks(f).ok_or_else(|| Error::parse(path, line_no, format!("not a rating: {f:?}")))?;
            if value < JESTER_SCALE.0 || value > JESTER_SCALE.1 {
                return Err(Error::parse(path, line_no, format!("rating {f} outside [-10, 10]")));
            }
            row.push((j as u32, value));
        }
        if row.len() != count {
            return Err(Error::parse(
                path,
                line_no,
                format!("count field says {count} ratings, row has {}", row.len()),
            ));
        }
        observed.push(row);
    }
    let width = width.ok_or_else(|| Error::Data(format!("{} holds no ratings", path.display())))?;
    Ok(RatingMatrix {
        users: (1..=observed.len()).map(|u| format!("u{u}")).collect(),
        items: (1..=width)
            .map(|j| Item {
                id: format!("joke{j}"),
                genres: Vec::new(),
            })
            .collect(),
        scale: JESTER_SCALE,
        observed,
        fill: None,
    })
}
