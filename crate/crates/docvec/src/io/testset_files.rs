//! Test-set and questions files: relation headers as `: name` lines,
//! questions as TAB-separated quadruples (titles contain spaces).

use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use crate::analogy::{AnalogyTestSet, RawRelation, RawTestSet, SkipReport};
use crate::error::{Error, Result};

use super::open_reader;

/// Parse a questions or test-set file into string quadruples.
pub fn read_questions(path: &Path) -> Result<RawTestSet> {
    let reader = open_reader(path)?;
    let mut relations: Vec<RawRelation> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix(':') {
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::format(path, i + 1, "empty relation name"));
            }
            if relations.iter().any(|r| r.name == name) {
                return Err(Error::format(
                    path,
                    i + 1,
                    format!("duplicate relation `{name}`"),
                ));
            }
            relations.push(RawRelation {
                name: name.to_string(),
                questions: Vec::new(),
            });
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [a, b, c, answer] = fields.as_slice() else {
            return Err(Error::format(
                path,
                i + 1,
                format!(
                    "expected 4 TAB-separated items, found {} (questions use TABs because \
                     titles may contain spaces)",
                    fields.len()
                ),
            ));
        };
        let Some(relation) = relations.last_mut() else {
            return Err(Error::format(
                path,
                i + 1,
                "question before any `: relation-name` header",
            ));
        };
        relation.questions.push([
            a.to_string(),
            b.to_string(),
            c.to_string(),
            answer.to_string(),
        ]);
    }
    Ok(RawTestSet { relations })
}

/// Serialize a built test set; `labels[id]` supplies each document's title.
pub fn write_testset(path: &Path, testset: &AnalogyTestSet, labels: &[String]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    for rel in testset.relations() {
        writeln!(out, ": {}", rel.name).map_err(|e| Error::io(path, e))?;
        for q in &rel.questions {
            let ids = q.ids();
            let mut titles = Vec::with_capacity(4);
            for id in ids {
                let label = labels.get(id as usize).ok_or_else(|| {
                    Error::Param(format!("document id {id} has no label to write"))
                })?;
                titles.push(label.as_str());
            }
            writeln!(out, "{}", titles.join("\t")).map_err(|e| Error::io(path, e))?;
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Skip report: a TSV with the question's four items and the skip reason.
pub fn write_skip_report(path: &Path, report: &SkipReport) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    for skipped in &report.skipped {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            skipped.items[0], skipped.items[1], skipped.items[2], skipped.items[3], skipped.reason
        )
        .map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analogy::build_testset;

    #[test]
    fn questions_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.tsv");
        std::fs::write(
            &path,
            ": capitals\nbeijing\tchina\tparis\tfrance\n: airlines\ncanada\tair canada\titaly\talitalia\n",
        )
        .unwrap();
        let raw = read_questions(&path).unwrap();
        assert_eq!(raw.relations.len(), 2);
        assert_eq!(raw.relations[1].questions[0][1], "air canada");

        let titles = [
            "beijing",
            "china",
            "paris",
            "france",
            "canada",
            "air canada",
            "italy",
            "alitalia",
        ];
        let (set, report) = build_testset(&raw, &titles).unwrap();
        assert_eq!(set.n_questions(), 2);
        assert!(report.skipped.is_empty());

        let out = dir.path().join("t.tsv");
        let labels: Vec<String> = titles.iter().map(|s| s.to_string()).collect();
        write_testset(&out, &set, &labels).unwrap();
        let reread = read_questions(&out).unwrap();
        assert_eq!(reread.relations.len(), 2);
        assert_eq!(reread.relations[0].questions[0][0], "beijing");
    }

    #[test]
    fn space_separated_questions_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.txt");
        std::fs::write(&path, ": rel\nbeijing china paris france\n").unwrap();
        let err = read_questions(&path).unwrap_err();
        assert_eq!(err.category(), "format");
    }

    #[test]
    fn question_without_relation_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.tsv");
        std::fs::write(&path, "a\tb\tc\td\n").unwrap();
        assert!(read_questions(&path).is_err());
    }
}
