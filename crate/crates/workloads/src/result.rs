//! Result rows of the read queries and their text form.

use finbench_core::{Path, Rounded3, Timestamp};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tcr1Row {
    pub other_id: u64,
    pub account_distance: u32,
    pub medium_id: u64,
    pub medium_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tcr2Row {
    pub other_id: u64,
    pub sum_loan_amount: Rounded3,
    pub sum_loan_balance: Rounded3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tcr4Row {
    pub other_id: u64,
    pub num_edge2: u64,
    pub sum_edge2_amount: Rounded3,
    pub max_edge2_amount: Rounded3,
    pub num_edge3: u64,
    pub sum_edge3_amount: Rounded3,
    pub max_edge3_amount: Rounded3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tcr6Row {
    pub mid_id: u64,
    pub sum_edge1_amount: Rounded3,
    pub sum_edge2_amount: Rounded3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tcr7Result {
    pub num_src: u64,
    pub num_dst: u64,
    pub in_out_ratio: Rounded3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tcr8Row {
    pub dst_id: u64,
    pub ratio: Rounded3,
    pub min_distance_from_loan: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tcr9Result {
    pub ratio_repay: Rounded3,
    pub ratio_deposit: Rounded3,
    pub ratio_transfer: Rounded3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tcr11Result {
    pub sum_loan_amount: Rounded3,
    pub num_loans: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tcr12Row {
    pub comp_account_id: u64,
    pub sum_edge2_amount: Rounded3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tsr1Result {
    pub create_time: Timestamp,
    pub is_blocked: bool,
    #[serde(rename = "type")]
    pub account_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tsr2Result {
    pub sum_edge1_amount: Rounded3,
    pub max_edge1_amount: Rounded3,
    pub num_edge1: u64,
    pub sum_edge2_amount: Rounded3,
    pub max_edge2_amount: Rounded3,
    pub num_edge2: u64,
}

/// Grouped transfers for TSR4 (`id` is the destination) and TSR5 (source).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EdgeGroupRow {
    pub id: u64,
    pub num_edges: u64,
    pub sum_amount: Rounded3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "query", content = "result")]
pub enum QueryResult {
    Tcr1(Vec<Tcr1Row>),
    Tcr2(Vec<Tcr2Row>),
    Tcr3(i64),
    Tcr4(Vec<Tcr4Row>),
    Tcr5(Vec<Path>),
    Tcr6(Vec<Tcr6Row>),
    Tcr7(Tcr7Result),
    Tcr8(Vec<Tcr8Row>),
    Tcr9(Tcr9Result),
    Tcr10(Rounded3),
    Tcr11(Tcr11Result),
    Tcr12(Vec<Tcr12Row>),
    Tsr1(Tsr1Result),
    Tsr2(Tsr2Result),
    Tsr3(Rounded3),
    Tsr4(Vec<EdgeGroupRow>),
    Tsr5(Vec<EdgeGroupRow>),
    Tsr6(Vec<u64>),
}

fn ts_text(t: Timestamp) -> String {
    t.format().unwrap_or_else(|_| t.0.to_string())
}

impl QueryResult {
    /// One `|`-separated line per result row.
    pub fn to_rows(&self) -> Vec<String> {
        use QueryResult::*;
        match self {
            Tcr1(r) => r
                .iter()
                .map(|x| {
                    format!(
                        "{}|{}|{}|{}",
                        x.other_id, x.account_distance, x.medium_id, x.medium_type
                    )
                })
                .collect(),
            Tcr2(r) => r
                .iter()
                .map(|x| {
                    format!(
                        "{}|{}|{}",
                        x.other_id, x.sum_loan_amount, x.sum_loan_balance
                    )
                })
                .collect(),
            Tcr3(n) => vec![n.to_string()],
            Tcr4(r) => r
                .iter()
                .map(|x| {
                    format!(
                        "{}|{}|{}|{}|{}|{}|{}",
                        x.other_id,
                        x.num_edge2,
                        x.sum_edge2_amount,
                        x.max_edge2_amount,
                        x.num_edge3,
                        x.sum_edge3_amount,
                        x.max_edge3_amount
                    )
                })
                .collect(),
            Tcr5(r) => r.iter().map(|p| p.to_string()).collect(),
            Tcr6(r) => r
                .iter()
                .map(|x| format!("{}|{}|{}", x.mid_id, x.sum_edge1_amount, x.sum_edge2_amount))
                .collect(),
            Tcr7(x) => vec![format!("{}|{}|{}", x.num_src, x.num_dst, x.in_out_ratio)],
            Tcr8(r) => r
                .iter()
                .map(|x| format!("{}|{}|{}", x.dst_id, x.ratio, x.min_distance_from_loan))
                .collect(),
            Tcr9(x) => vec![format!(
                "{}|{}|{}",
                x.ratio_repay, x.ratio_deposit, x.ratio_transfer
            )],
            Tcr10(x) => vec![x.to_string()],
            Tcr11(x) => vec![format!("{}|{}", x.sum_loan_amount, x.num_loans)],
            Tcr12(r) => r
                .iter()
                .map(|x| format!("{}|{}", x.comp_account_id, x.sum_edge2_amount))
                .collect(),
            Tsr1(x) => vec![format!(
                "{}|{}|{}",
                ts_text(x.create_time),
                x.is_blocked,
                x.account_type
            )],
            Tsr2(x) => vec![format!(
                "{}|{}|{}|{}|{}|{}",
                x.sum_edge1_amount,
                x.max_edge1_amount,
                x.num_edge1,
                x.sum_edge2_amount,
                x.max_edge2_amount,
                x.num_edge2
            )],
            Tsr3(x) => vec![x.to_string()],
            Tsr4(r) | Tsr5(r) => r
                .iter()
                .map(|x| format!("{}|{}|{}", x.id, x.num_edges, x.sum_amount))
                .collect(),
            Tsr6(r) => r.iter().map(|x| x.to_string()).collect(),
        }
    }

    pub fn row_count(&self) -> usize {
        use QueryResult::*;
        match self {
            Tcr1(r) => r.len(),
            Tcr2(r) => r.len(),
            Tcr4(r) => r.len(),
            Tcr5(r) => r.len(),
            Tcr6(r) => r.len(),
            Tcr8(r) => r.len(),
            Tcr12(r) => r.len(),
            Tsr4(r) | Tsr5(r) => r.len(),
            Tsr6(r) => r.len(),
            _ => 1,
        }
    }
}
