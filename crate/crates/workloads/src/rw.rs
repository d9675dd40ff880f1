//! Read-write transactions TRW1..TRW3: guard, write, detect, then either
//! commit or roll back and block the participants.

use finbench_core::{Money, Rounded3, Timestamp, TruncationOrder, TruncationSpec, Window};
use finbench_engine::{Direction, EdgeKind, EdgeRecord, Engine, Txn, VertexRef};
use serde::{Deserialize, Serialize};

use crate::error::{Result, WorkloadError};
use crate::query::{format_time, parse_time};
use crate::read;

/// How many times blocking is retried after a detection abort.
const BLOCK_RETRIES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RwOutcome {
    Committed,
    /// A participant was already blocked; nothing was written.
    GuardAbort,
    /// The check fired: the edge was rolled back and both ends blocked.
    Detected,
}

impl RwOutcome {
    pub fn committed(self) -> bool {
        self == RwOutcome::Committed
    }
}

/// Parameters shared by the three read-write cards. `threshold` is TRW2's
/// amountThreshold and TRW3's loan-sum threshold; `amount` and
/// `ratio_threshold` are unused by TRW3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReadWrite {
    pub number: u8,
    pub src_id: u64,
    pub dst_id: u64,
    pub time: Timestamp,
    pub amount: Money,
    pub threshold: Rounded3,
    pub ratio_threshold: Rounded3,
    pub window: Window,
    pub trunc: TruncationSpec,
}

const COLUMNS: [&[&str]; 3] = [
    &["srcId", "dstId", "time", "amount", "startTime", "endTime"],
    &[
        "srcId",
        "dstId",
        "time",
        "amount",
        "amountThreshold",
        "startTime",
        "endTime",
        "ratioThreshold",
        "truncationLimit",
        "truncationOrder",
    ],
    &[
        "srcId",
        "dstId",
        "time",
        "threshold",
        "startTime",
        "endTime",
        "truncationLimit",
        "truncationOrder",
    ],
];

pub fn rw_columns(number: u8) -> Option<&'static [&'static str]> {
    COLUMNS.get(usize::from(number).checked_sub(1)?).copied()
}

impl ReadWrite {
    pub fn trw1(src_id: u64, dst_id: u64, time: Timestamp, amount: Money, window: Window) -> Self {
        ReadWrite {
            number: 1,
            src_id,
            dst_id,
            time,
            amount,
            threshold: Rounded3::ZERO,
            ratio_threshold: Rounded3::ZERO,
            window,
            trunc: TruncationSpec::unlimited(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn trw2(
        src_id: u64,
        dst_id: u64,
        time: Timestamp,
        amount: Money,
        amount_threshold: Rounded3,
        window: Window,
        ratio_threshold: Rounded3,
        trunc: TruncationSpec,
    ) -> Self {
        ReadWrite {
            number: 2,
            src_id,
            dst_id,
            time,
            amount,
            threshold: amount_threshold,
            ratio_threshold,
            window,
            trunc,
        }
    }

    pub fn trw3(
        src_id: u64,
        dst_id: u64,
        time: Timestamp,
        threshold: Rounded3,
        window: Window,
        trunc: TruncationSpec,
    ) -> Self {
        ReadWrite {
            number: 3,
            src_id,
            dst_id,
            time,
            amount: Money::ZERO,
            threshold,
            ratio_threshold: Rounded3::ZERO,
            window,
            trunc,
        }
    }

    pub fn name(&self) -> String {
        format!("TRW{}", self.number)
    }

    pub fn fields(&self) -> Vec<String> {
        let mut f = vec![
            self.src_id.to_string(),
            self.dst_id.to_string(),
            format_time(self.time),
        ];
        let win = [format_time(self.window.start), format_time(self.window.end)];
        let tr = [self.trunc.limit.to_string(), self.trunc.order.to_string()];
        match self.number {
            1 => {
                f.push(self.amount.to_string());
                f.extend(win);
            }
            2 => {
                f.push(self.amount.to_string());
                f.push(self.threshold.to_string());
                f.extend(win);
                f.push(self.ratio_threshold.to_string());
                f.extend(tr);
            }
            _ => {
                f.push(self.threshold.to_string());
                f.extend(win);
                f.extend(tr);
            }
        }
        f
    }

    pub fn from_fields(number: u8, f: &[&str]) -> Result<ReadWrite> {
        let cols = rw_columns(number)
            .ok_or_else(|| WorkloadError::Params(format!("unknown read-write TRW{number}")))?;
        if f.len() != cols.len() {
            return Err(WorkloadError::Params(format!(
                "TRW{number} expects {} fields, got {}",
                cols.len(),
                f.len()
            )));
        }
        let id = |s: &str| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| WorkloadError::Params(format!("bad id {s:?}")))
        };
        let trunc = |l: &str, o: &str| -> Result<TruncationSpec> {
            let limit = l
                .trim()
                .parse()
                .map_err(|_| WorkloadError::Params(format!("bad limit {l:?}")))?;
            Ok(TruncationSpec::new(limit, o.parse::<TruncationOrder>()?)?)
        };
        let (src, dst, time) = (id(f[0])?, id(f[1])?, parse_time(f[2])?);
        Ok(match number {
            1 => ReadWrite::trw1(
                src,
                dst,
                time,
                Money::parse(f[3])?,
                Window::new(parse_time(f[4])?, parse_time(f[5])?),
            ),
            2 => ReadWrite::trw2(
                src,
                dst,
                time,
                Money::parse(f[3])?,
                Rounded3::parse(f[4])?,
                Window::new(parse_time(f[5])?, parse_time(f[6])?),
                Rounded3::parse(f[7])?,
                trunc(f[8], f[9])?,
            ),
            _ => ReadWrite::trw3(
                src,
                dst,
                time,
                Rounded3::parse(f[3])?,
                Window::new(parse_time(f[4])?, parse_time(f[5])?),
                trunc(f[6], f[7])?,
            ),
        })
    }

    fn endpoints(&self) -> [VertexRef; 2] {
        if self.number == 3 {
            [
                VertexRef::person(self.src_id),
                VertexRef::person(self.dst_id),
            ]
        } else {
            [
                VertexRef::account(self.src_id),
                VertexRef::account(self.dst_id),
            ]
        }
    }

    /// Runs the transaction. Lock conflicts surface as errors so the caller
    /// can retry the whole operation.
    pub fn run(&self, engine: &Engine) -> Result<RwOutcome> {
        let ends = self.endpoints();
        let mut t = engine.begin()?;
        for v in ends {
            if read::is_blocked(&mut t, v)? {
                t.abort();
                return Ok(RwOutcome::GuardAbort);
            }
        }
        let detected = match self.number {
            1 => {
                self.insert_transfer(&mut t)?;
                !read::tcr4(&mut t, self.src_id, self.dst_id, &self.window)?.is_empty()
            }
            2 => {
                self.insert_transfer(&mut t)?;
                let mut over = false;
                for id in [self.src_id, self.dst_id] {
                    let r = read::tcr7(&mut t, id, self.threshold, &self.window, &self.trunc)?;
                    // -1 means no transfer-out, which never counts as exceeding.
                    if !r.in_out_ratio.is_sentinel() && r.in_out_ratio > self.ratio_threshold {
                        over = true;
                    }
                }
                over
            }
            _ => {
                let [src, dst] = ends;
                let existing = t.neighbors(
                    src,
                    EdgeKind::Guarantee,
                    Direction::Out,
                    &Window::unbounded(),
                    None,
                )?;
                if !existing.iter().any(|e| e.dst == dst) {
                    t.insert_edge(EdgeRecord::new(EdgeKind::Guarantee, src, dst, self.time))?;
                }
                let r = read::tcr11(&mut t, self.src_id, &self.window, &self.trunc)?;
                r.sum_loan_amount > self.threshold
            }
        };
        if !detected {
            t.commit()?;
            return Ok(RwOutcome::Committed);
        }
        t.abort();
        engine.run(BLOCK_RETRIES, |t| {
            for v in ends {
                t.update_property(v, "isBlocked", true)?;
            }
            Ok(())
        })?;
        Ok(RwOutcome::Detected)
    }

    fn insert_transfer(&self, t: &mut Txn) -> Result<()> {
        let [src, dst] = self.endpoints();
        t.insert_edge(
            EdgeRecord::new(EdgeKind::Transfer, src, dst, self.time).with_amount(self.amount),
        )?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_round_trip() {
        let w = Window::new(
            Timestamp::from_ymd(2020, 1, 1),
            Timestamp::from_ymd(2020, 2, 1),
        );
        let tr = TruncationSpec::new(10, TruncationOrder::AmountDescending).unwrap();
        let t = Timestamp::from_ymd(2020, 1, 15);
        for rw in [
            ReadWrite::trw1(1, 2, t, Money::units(3), w),
            ReadWrite::trw2(
                1,
                2,
                t,
                Money::units(3),
                Rounded3::from_int(1),
                w,
                Rounded3::from_thousandths(1500),
                tr,
            ),
            ReadWrite::trw3(1, 2, t, Rounded3::from_int(500), w, tr),
        ] {
            let f = rw.fields();
            assert_eq!(f.len(), rw_columns(rw.number).unwrap().len());
            let refs: Vec<&str> = f.iter().map(String::as_str).collect();
            assert_eq!(ReadWrite::from_fields(rw.number, &refs).unwrap(), rw);
        }
    }
}
