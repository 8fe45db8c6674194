use std::io;

use serde::Serialize;

use super::RunRecord;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub problem: String,
    pub class: String,
    pub strategy: String,
    /// Unsolved runs enter with their recorded time.
    pub median_time_s: f64,
    /// Over solved runs only; empty when none was solved.
    pub median_guesses: Option<f64>,
    pub completed: usize,
    pub timeouts: usize,
}

/// Middle value, or the mean of the two middle values for even counts.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    })
}

/// One row per (problem, class, strategy), in order of first appearance.
pub fn summarize_medians(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(&str, &str, &str)> = Vec::new();
    for r in records {
        let k = (r.problem.as_str(), r.class.as_str(), r.strategy.as_str());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let mut out = Vec::with_capacity(keys.len());
    for (problem, class, strategy) in keys {
        let group: Vec<&RunRecord> = records
            .iter()
            .filter(|r| r.problem == problem && r.class == class && r.strategy == strategy)
            .collect();
        let times: Vec<f64> = group.iter().map(|r| r.time_s).collect();
        let guesses: Vec<f64> = group
            .iter()
            .filter(|r| r.solved())
            .map(|r| r.guesses as f64)
            .collect();
        if group.len().is_multiple_of(2) {
            log::warn!("{problem} {class} {strategy}: even number of runs");
        }
        let completed = guesses.len();
        out.push(SummaryRow {
            problem: problem.to_string(),
            class: class.to_string(),
            strategy: strategy.to_string(),
            median_time_s: median(&times).expect("groups are never empty"),
            median_guesses: median(&guesses),
            completed,
            timeouts: group.len() - completed,
        });
    }
    out
}

pub fn write_records_csv<W: io::Write>(w: W, records: &[RunRecord]) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in records {
        wr.serialize(r)?;
    }
    if records.is_empty() {
        wr.write_record([
            "problem",
            "class",
            "instance",
            "strategy",
            "answersets",
            "guesses",
            "conflicts",
            "time_s",
            "timeout",
        ])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: io::Write>(w: W, rows: &[SummaryRow]) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    if rows.is_empty() {
        wr.write_record([
            "problem",
            "class",
            "strategy",
            "median_time_s",
            "median_guesses",
            "completed",
            "timeouts",
        ])?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(time_s: f64, guesses: u64, timeout: bool) -> RunRecord {
        RunRecord {
            problem: "graph_colouring".into(),
            class: "v10_e40_c3".into(),
            instance: 0,
            strategy: "default".into(),
            answersets: 1,
            guesses,
            conflicts: 0,
            time_s,
            timeout,
            memory_cap: false,
            error: None,
        }
    }

    #[test]
    fn timeouts_enter_time_but_not_guesses() {
        let rows =
            summarize_medians(&[rec(1.0, 5, false), rec(900.0, 99, true), rec(2.0, 7, false)]);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].median_time_s, 2.0);
        assert_eq!(rows[0].median_guesses, Some(6.0));
        assert_eq!((rows[0].completed, rows[0].timeouts), (2, 1));
    }

    #[test]
    fn single_record_is_its_own_median() {
        let rows = summarize_medians(&[rec(3.5, 4, false)]);
        assert_eq!(rows[0].median_time_s, 3.5);
        assert_eq!(rows[0].median_guesses, Some(4.0));
    }

    #[test]
    fn headers() {
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &[rec(1.0, 2, false)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "problem,class,instance,strategy,answersets,guesses,conflicts,time_s,timeout"
        );
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &summarize_medians(&[rec(1.0, 2, true)])).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "problem,class,strategy,median_time_s,median_guesses,completed,timeouts"
        );
        assert_eq!(
            lines.next().unwrap(),
            "graph_colouring,v10_e40_c3,default,1.0,,0,1"
        );
    }
}
