//! JSON and flat-CSV serialization of solution sets.

use std::io::{Read, Write};

use super::{ObjectiveBlock, Solution, SolutionSet};
use crate::error::{Error, Result};

/// Formats a float with 17 significant digits; parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{:.16e}", v)
}

pub fn write_solutions_json<W: Write>(set: &SolutionSet, writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, set)?;
    Ok(())
}

pub fn read_solutions_json<R: Read>(reader: R) -> Result<SolutionSet> {
    Ok(serde_json::from_reader(reader)?)
}

/// Writes one row per solution: `x1..xn, f1_1..f1_K1, f2_1..`.
pub fn write_solutions_csv<W: Write>(set: &SolutionSet, writer: W) -> Result<()> {
    let layout = set.common_layout()?;
    let n = set.solutions[0].decision.len();
    let mut out = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{}", i)).collect();
    for p in &layout {
        header.extend((1..=p.num_objectives).map(|k| format!("f{}_{}", p.party_id, k)));
    }
    out.write_record(&header)?;
    for s in set {
        let row: Vec<String> =
            s.decision.iter().chain(s.objectives.iter().flat_map(|b| b.values.iter())).map(|v| fmt_f64(*v)).collect();
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

enum Column {
    Decision,
    Objective { party: usize },
}

fn parse_header(header: &csv::StringRecord) -> Result<Vec<Column>> {
    let mut cols = Vec::with_capacity(header.len());
    let mut seen_objective = false;
    let mut last_party = 0;
    for name in header.iter() {
        let name = name.trim();
        if let Some(rest) = name.strip_prefix('x') {
            if seen_objective || rest.parse::<usize>().is_err() {
                return Err(Error::config(format!("unexpected CSV column {:?}", name)));
            }
            cols.push(Column::Decision);
        } else if let Some(rest) = name.strip_prefix('f') {
            let party = rest
                .split_once('_')
                .and_then(|(p, k)| Some((p.parse::<usize>().ok()?, k.parse::<usize>().ok()?)))
                .map(|(p, _)| p)
                .ok_or_else(|| Error::config(format!("bad objective column {:?}", name)))?;
            if party < last_party || party > last_party + 1 {
                return Err(Error::config(format!("objective column {:?} out of party order", name)));
            }
            last_party = party;
            seen_objective = true;
            cols.push(Column::Objective { party });
        } else {
            return Err(Error::config(format!("unexpected CSV column {:?}", name)));
        }
    }
    Ok(cols)
}

pub fn read_solutions_csv<R: Read>(reader: R) -> Result<SolutionSet> {
    let mut rdr = csv::Reader::from_reader(reader);
    let cols = parse_header(rdr.headers()?)?;
    let mut solutions = Vec::new();
    for record in rdr.records() {
        let record = record?;
        if record.len() != cols.len() {
            return Err(Error::config("CSV row length differs from header"));
        }
        let mut decision = Vec::new();
        let mut objectives: Vec<ObjectiveBlock> = Vec::new();
        for (field, col) in record.iter().zip(&cols) {
            let v: f64 =
                field.trim().parse().map_err(|_| Error::config(format!("cannot parse {:?} as a number", field)))?;
            match col {
                Column::Decision => decision.push(v),
                Column::Objective { party } => match objectives.last_mut() {
                    Some(b) if b.party == *party => b.values.push(v),
                    _ => objectives.push(ObjectiveBlock::new(*party, vec![v])),
                },
            }
        }
        solutions.push(Solution::new(decision, objectives));
    }
    Ok(SolutionSet::new(solutions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn finite() -> impl Strategy<Value = f64> {
        prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO
    }

    fn solution_set() -> impl Strategy<Value = SolutionSet> {
        prop::collection::vec(
            (
                prop::collection::vec(finite(), 2),
                prop::collection::vec(finite(), 2),
                prop::collection::vec(finite(), 3),
            ),
            1..8,
        )
        .prop_map(|rows| {
            rows.into_iter()
                .map(|(x, a, b)| Solution::new(x, vec![ObjectiveBlock::new(1, a), ObjectiveBlock::new(2, b)]))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn json_and_csv_round_trip_bit_exactly(set in solution_set()) {
            let mut buf = Vec::new();
            write_solutions_json(&set, &mut buf).unwrap();
            let back = read_solutions_json(&buf[..]).unwrap();
            prop_assert_eq!(&back, &set);

            let mut buf = Vec::new();
            write_solutions_csv(&set, &mut buf).unwrap();
            let back = read_solutions_csv(&buf[..]).unwrap();
            for (a, b) in back.iter().zip(set.iter()) {
                let bits = |s: &Solution| s.decision.iter().chain(s.joint().iter()).map(|v| v.to_bits()).collect::<Vec<_>>();
                prop_assert_eq!(bits(a), bits(b));
            }
        }
    }

    #[test]
    fn json_layout_matches_documented_shape() {
        let set = SolutionSet::new(vec![Solution::new(vec![1.0], vec![ObjectiveBlock::new(1, vec![2.0])])]);
        let v: serde_json::Value = serde_json::to_value(&set).unwrap();
        assert_eq!(v, serde_json::json!([{"decision": [1.0], "objectives": [{"party": 1, "values": [2.0]}]}]));
    }

    #[test]
    fn csv_header_names_columns() {
        let set = SolutionSet::new(vec![Solution::new(
            vec![1.0, 2.0],
            vec![ObjectiveBlock::new(1, vec![3.0, 4.0]), ObjectiveBlock::new(2, vec![5.0])],
        )]);
        let mut buf = Vec::new();
        write_solutions_csv(&set, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "x1,x2,f1_1,f1_2,f2_1");
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(read_solutions_csv("x1,g1\n1,2\n".as_bytes()).is_err());
        assert!(read_solutions_csv("x1,f2_1\n1,2\n".as_bytes()).is_err());
        assert!(read_solutions_csv("x1,f1_1\n1,abc\n".as_bytes()).is_err());
    }
}
