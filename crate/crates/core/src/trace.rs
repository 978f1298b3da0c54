//! Operation traces: a line-oriented format for replaying update and
//! prefix-sum sequences against an encoded array.
//!
//! One operation per line: `U <j> <delta>` applies an update, and
//! `P <j> <i|e>` queries a prefix sum with an inclusive or exclusive
//! boundary. Replaying a trace yields one output value per `P` line.

use thiserror::Error;

use crate::encoding::{Boundary, EncodedArray, EncodingError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("trace line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOp {
    Update { index: usize, delta: i64 },
    Prefix { index: usize, boundary: Boundary },
}

/// Parses a trace. Blank lines are ignored.
pub fn parse_trace(text: &str) -> Result<Vec<TraceOp>, TraceError> {
    let mut ops = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let err = |message: String| TraceError::Parse { line, message };
        match fields[0] {
            "U" => {
                if fields.len() != 3 {
                    return Err(err("expected `U <j> <delta>`".into()));
                }
                let index = fields[1]
                    .parse()
                    .map_err(|_| err(format!("bad index {:?}", fields[1])))?;
                let delta = fields[2]
                    .parse()
                    .map_err(|_| err(format!("bad delta {:?}", fields[2])))?;
                ops.push(TraceOp::Update { index, delta });
            }
            "P" => {
                if fields.len() != 3 {
                    return Err(err("expected `P <j> <i|e>`".into()));
                }
                let index = fields[1]
                    .parse()
                    .map_err(|_| err(format!("bad index {:?}", fields[1])))?;
                let boundary = match fields[2] {
                    "i" => Boundary::Inclusive,
                    "e" => Boundary::Exclusive,
                    other => return Err(err(format!("bad boundary {other:?}, expected i or e"))),
                };
                ops.push(TraceOp::Prefix { index, boundary });
            }
            other => return Err(err(format!("unknown op {other:?}"))),
        }
    }
    Ok(ops)
}

/// Replays a trace against an encoded array, collecting one value per
/// prefix query.
pub fn run_trace(array: &mut EncodedArray, ops: &[TraceOp]) -> Result<Vec<i64>, EncodingError> {
    let mut out = Vec::new();
    for op in ops {
        match *op {
            TraceOp::Update { index, delta } => array.apply_update(index, delta)?,
            TraceOp::Prefix { index, boundary } => out.push(array.prefix_sum(index, boundary)?),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::Mode;
    use crate::forest::build_sierpinski;

    #[test]
    fn parse_and_run() {
        let text = "U 0 1\nP 0 i\n\nU 4 1\nP 8 i\nP 0 e\n";
        let ops = parse_trace(text).unwrap();
        assert_eq!(ops.len(), 5);
        let forest = build_sierpinski(9).unwrap();
        let mut array = EncodedArray::zeros(&forest, Mode::Bit);
        let replies = run_trace(&mut array, &ops).unwrap();
        assert_eq!(replies, vec![1, 0, 0]);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(
            parse_trace("Q 1 2"),
            Err(TraceError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_trace("U 1\n"),
            Err(TraceError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_trace("P 1 x"),
            Err(TraceError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn bit_mode_rejects_bad_delta_at_run_time() {
        let forest = build_sierpinski(3).unwrap();
        let mut array = EncodedArray::zeros(&forest, Mode::Bit);
        let ops = parse_trace("U 0 5").unwrap();
        assert!(matches!(
            run_trace(&mut array, &ops),
            Err(EncodingError::BadDelta { delta: 5 })
        ));
    }
}
