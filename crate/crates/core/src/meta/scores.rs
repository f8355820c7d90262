//! Images × models score tables and per-image rankings.
//!
//! CSV layout: header `image_id,<model>,<model>,...`, then one row per image.
//! Scores are written with 17 significant digits so files re-read bit-exactly.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    image_ids: Vec<String>,
    model_ids: Vec<String>,
    scores: Vec<f64>,
}

/// Formats a score with 17 significant digits.
pub fn format_score(v: f64) -> String {
    format!("{v:.16e}")
}

impl ScoreMatrix {
    pub fn new(image_ids: Vec<String>, model_ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != image_ids.len() {
            return Err(Error::LengthMismatch(image_ids.len(), rows.len()));
        }
        let mut scores = Vec::with_capacity(rows.len() * model_ids.len());
        for row in rows {
            if row.len() != model_ids.len() {
                return Err(Error::LengthMismatch(model_ids.len(), row.len()));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("score matrix entries must be finite".into()));
            }
            scores.extend(row);
        }
        check_unique(&image_ids, "image")?;
        check_unique(&model_ids, "model")?;
        Ok(ScoreMatrix {
            image_ids,
            model_ids,
            scores,
        })
    }

    pub fn image_ids(&self) -> &[String] {
        &self.image_ids
    }

    pub fn model_ids(&self) -> &[String] {
        &self.model_ids
    }

    pub fn n_images(&self) -> usize {
        self.image_ids.len()
    }

    pub fn n_models(&self) -> usize {
        self.model_ids.len()
    }

    pub fn row(&self, image: usize) -> &[f64] {
        let m = self.model_ids.len();
        &self.scores[image * m..(image + 1) * m]
    }

    pub fn get(&self, image: usize, model: usize) -> f64 {
        self.row(image)[model]
    }

    /// Mean score of every model over all images.
    pub fn model_means(&self) -> Vec<f64> {
        let n = self.n_images().max(1) as f64;
        (0..self.n_models())
            .map(|j| (0..self.n_images()).map(|i| self.get(i, j)).sum::<f64>() / n)
            .collect()
    }

    /// Same table with rows and columns reordered to match `reference`.
    pub fn aligned_to(&self, reference: &ScoreMatrix) -> Result<ScoreMatrix> {
        let find = |ids: &[String], id: &str, kind: &str| {
            ids.iter()
                .position(|x| x == id)
                .ok_or_else(|| Error::IdMismatch(format!("{kind} '{id}' missing")))
        };
        if self.n_images() != reference.n_images() || self.n_models() != reference.n_models() {
            return Err(Error::IdMismatch(format!(
                "shape {}x{} vs {}x{}",
                self.n_images(),
                self.n_models(),
                reference.n_images(),
                reference.n_models()
            )));
        }
        let cols = reference
            .model_ids
            .iter()
            .map(|m| find(&self.model_ids, m, "model"))
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::with_capacity(self.n_images());
        for id in &reference.image_ids {
            let i = find(&self.image_ids, id, "image")?;
            rows.push(cols.iter().map(|&j| self.get(i, j)).collect());
        }
        ScoreMatrix::new(reference.image_ids.clone(), reference.model_ids.clone(), rows)
    }

    /// Rows sorted by image id.
    pub fn sorted_by_image(&self) -> ScoreMatrix {
        let mut order: Vec<usize> = (0..self.n_images()).collect();
        order.sort_by(|&a, &b| self.image_ids[a].cmp(&self.image_ids[b]));
        ScoreMatrix {
            image_ids: order.iter().map(|&i| self.image_ids[i].clone()).collect(),
            model_ids: self.model_ids.clone(),
            scores: order.iter().flat_map(|&i| self.row(i).to_vec()).collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header = std::iter::once("image_id").chain(self.model_ids.iter().map(String::as_str));
        w.write_record(header).map_err(csv_err)?;
        for (i, id) in self.image_ids.iter().enumerate() {
            let record = std::iter::once(id.clone()).chain(self.row(i).iter().map(|&v| format_score(v)));
            w.write_record(record).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let header = r.headers().map_err(csv_err)?.clone();
        if header.get(0) != Some("image_id") {
            return Err(Error::Csv("first header column must be 'image_id'".into()));
        }
        let model_ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut image_ids = Vec::new();
        let mut rows = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            if rec.len() != model_ids.len() + 1 {
                return Err(Error::Csv(format!(
                    "row {} has {} fields, expected {}",
                    line + 2,
                    rec.len(),
                    model_ids.len() + 1
                )));
            }
            image_ids.push(rec[0].to_string());
            let row = rec
                .iter()
                .skip(1)
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Csv(format!("row {}: '{s}' is not a number", line + 2)))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        ScoreMatrix::new(image_ids, model_ids, rows)
    }

    pub fn read_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_csv(f)
    }

    pub fn write_csv_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}

fn check_unique(ids: &[String], kind: &str) -> Result<()> {
    let mut sorted: Vec<&String> = ids.iter().collect();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::IdMismatch(format!("duplicate {kind} id '{}'", w[0])));
    }
    Ok(())
}

/// Ranks of models for one image; rank 1 is the best (highest) score and tied
/// scores share their average rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    ranks: Vec<f64>,
}

impl RankVector {
    pub fn new(ranks: Vec<f64>) -> Self {
        RankVector { ranks }
    }

    pub fn from_scores(scores: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
        let mut ranks = vec![0.0; scores.len()];
        let mut start = 0;
        while start < order.len() {
            let mut end = start + 1;
            while end < order.len() && scores[order[end]] == scores[order[start]] {
                end += 1;
            }
            // positions start..end hold ranks start+1 ..= end
            let avg = (start + 1 + end) as f64 / 2.0;
            for &i in &order[start..end] {
                ranks[i] = avg;
            }
            start = end;
        }
        RankVector { ranks }
    }

    pub fn ranks(&self) -> &[f64] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// First model holding the best rank.
    pub fn top(&self) -> Option<usize> {
        self.ranks.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i)
    }

    /// `1 + ` number of models ranked strictly better than `model`.
    pub fn position(&self, model: usize) -> usize {
        let r = self.ranks[model];
        1 + self.ranks.iter().filter(|&&x| x < r).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ranks_with_ties() {
        assert_eq!(RankVector::from_scores(&[0.3]).ranks(), &[1.0]);
        assert_eq!(RankVector::from_scores(&[0.9, 0.1]).ranks(), &[1.0, 2.0]);
        assert_eq!(RankVector::from_scores(&[0.5, 0.5]).ranks(), &[1.5, 1.5]);
        assert_eq!(RankVector::from_scores(&[0.2, 0.8, 0.2, 0.5]).ranks(), &[3.5, 1.0, 3.5, 2.0]);
        let r = RankVector::from_scores(&[0.2, 0.8, 0.8, 0.5]);
        assert_eq!(r.top(), Some(1));
        assert_eq!(r.position(2), 1);
        assert_eq!(r.position(0), 4);
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let m = ScoreMatrix::new(
            vec!["b".into(), "a".into()],
            vec!["m1".into(), "m2".into()],
            vec![vec![0.1, 1.0 / 3.0], vec![0.7, 2.0f64.sqrt() / 2.0]],
        )
        .unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("image_id,m1,m2\n"));
        assert_eq!(ScoreMatrix::read_csv(&buf[..]).unwrap(), m);

        assert!(ScoreMatrix::read_csv("id,m1\nx,0.5\n".as_bytes()).is_err());
        assert!(ScoreMatrix::read_csv("image_id,m1\nx,abc\n".as_bytes()).is_err());
        assert!(ScoreMatrix::read_csv("image_id,m1\nx,0.1,0.2\n".as_bytes()).is_err());
        assert!(ScoreMatrix::read_csv("image_id,m1\nx,0.1\nx,0.2\n".as_bytes()).is_err());
    }

    #[test]
    fn alignment_reorders() {
        let a = ScoreMatrix::new(
            vec!["x".into(), "y".into()],
            vec!["p".into(), "q".into()],
            vec![vec![1.0, 2.0], vec![3.0, 4.0]],
        )
        .unwrap();
        let b = ScoreMatrix::new(
            vec!["y".into(), "x".into()],
            vec!["q".into(), "p".into()],
            vec![vec![4.0, 3.0], vec![2.0, 1.0]],
        )
        .unwrap();
        assert_eq!(b.aligned_to(&a).unwrap(), a);
        assert_eq!(b.sorted_by_image().image_ids(), &["x".to_string(), "y".to_string()]);
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_exact(rows in proptest::collection::vec(proptest::collection::vec(-1e6f64..1e6, 3), 1..6)) {
            let ids: Vec<String> = (0..rows.len()).map(|i| format!("img{i}")).collect();
            let m = ScoreMatrix::new(ids, vec!["a".into(), "b".into(), "c".into()], rows).unwrap();
            let mut buf = Vec::new();
            m.write_csv(&mut buf).unwrap();
            prop_assert_eq!(ScoreMatrix::read_csv(&buf[..]).unwrap(), m);
        }

        #[test]
        fn ranks_sum_is_fixed(scores in proptest::collection::vec(0u8..5, 1..12)) {
            let s: Vec<f64> = scores.iter().map(|&v| f64::from(v)).collect();
            let r = RankVector::from_scores(&s);
            let n = s.len() as f64;
            prop_assert!((r.ranks().iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() < 1e-9);
        }
    }
}
