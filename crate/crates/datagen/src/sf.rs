//! Scale factors and their entity-count targets.

use std::fmt;
use std::str::FromStr;

use finbench_core::Timestamp;

use crate::error::DatagenError;

/// Output file names, one per vertex or edge table.
pub const FILES: [&str; 19] = [
    "account",
    "company",
    "companyApplyLoan",
    "companyGuarantee",
    "companyInvest",
    "companyOwnAccount",
    "deposit",
    "loan",
    "loanTransfer",
    "medium",
    "person",
    "personApplyLoan",
    "personGuarantee",
    "personInvest",
    "personOwnAccount",
    "repay",
    "signIn",
    "transfer",
    "withdraw",
];

/// Index into [`FILES`] and into the per-SF count rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum File {
    Account,
    Company,
    CompanyApplyLoan,
    CompanyGuarantee,
    CompanyInvest,
    CompanyOwnAccount,
    Deposit,
    Loan,
    LoanTransfer,
    Medium,
    Person,
    PersonApplyLoan,
    PersonGuarantee,
    PersonInvest,
    PersonOwnAccount,
    Repay,
    SignIn,
    Transfer,
    Withdraw,
}

impl File {
    pub const ALL: [File; 19] = [
        File::Account,
        File::Company,
        File::CompanyApplyLoan,
        File::CompanyGuarantee,
        File::CompanyInvest,
        File::CompanyOwnAccount,
        File::Deposit,
        File::Loan,
        File::LoanTransfer,
        File::Medium,
        File::Person,
        File::PersonApplyLoan,
        File::PersonGuarantee,
        File::PersonInvest,
        File::PersonOwnAccount,
        File::Repay,
        File::SignIn,
        File::Transfer,
        File::Withdraw,
    ];

    pub fn name(self) -> &'static str {
        FILES[self as usize]
    }

    pub fn is_vertex(self) -> bool {
        matches!(
            self,
            File::Account | File::Company | File::Loan | File::Medium | File::Person
        )
    }

    /// Counts that are fixed by construction rather than simulated.
    pub fn is_exact(self) -> bool {
        matches!(self, File::Person | File::Company | File::Medium)
    }
}

impl fmt::Display for File {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const NAMES: [&str; 6] = ["SF0.01", "SF0.1", "SF0.3", "SF1", "SF3", "SF10"];

/// Entity counts per scale factor, in [`FILES`] order.
const TABLE: [[u64; 19]; 6] = [
    [
        2633, 2633, 524, 248, 860, 864, 5199, 1597, 4886, 1000, 800, 1073, 469, 1650, 1769, 5046,
        4384, 14145, 20557,
    ],
    [
        26347, 4000, 5332, 2315, 8639, 8805, 51686, 16138, 49180, 10000, 8000, 10806, 4694, 17296,
        17542, 50495, 44540, 138209, 201119,
    ],
    [
        79199, 12000, 15761, 7123, 25853, 26356, 153521, 47772, 145679, 30000, 24000, 32011, 14221,
        52002, 52843, 149559, 134532, 411882, 609548,
    ],
    [
        264075, 40000, 52820, 23870, 86092, 88119, 512680, 159166, 484657, 100000, 80000, 106346,
        47935, 174064, 175956, 497033, 451362, 1379527, 2011359,
    ],
    [
        791769, 120000, 158678, 71716, 259884, 264352, 1534595, 476670, 1453874, 300000, 240000,
        317992, 144064, 520584, 527417, 1488916, 1350759, 4136803, 6013709,
    ],
    [
        1980883, 300000, 397060, 179526, 650190, 660625, 3829905, 1189072, 3625556, 2000000,
        600000, 792012, 359283, 1300980, 1320258, 3715487, 8996781, 11005032, 15056721,
    ],
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleFactorSpec {
    pub name: String,
    /// Target count per file, in [`FILES`] order. Person, company and medium
    /// are produced exactly; the rest drive the simulation rates.
    pub targets: [u64; 19],
    pub start: Timestamp,
    pub end: Timestamp,
}

impl ScaleFactorSpec {
    pub fn names() -> &'static [&'static str] {
        &NAMES
    }

    /// Built-in scale factor by name ("SF0.1" or "0.1").
    pub fn builtin(name: &str) -> Option<ScaleFactorSpec> {
        let key = name.trim();
        let key = key
            .strip_prefix("SF")
            .or_else(|| key.strip_prefix("sf"))
            .unwrap_or(key);
        let i = NAMES.iter().position(|n| &n[2..] == key)?;
        Some(ScaleFactorSpec {
            name: NAMES[i].to_owned(),
            targets: TABLE[i],
            start: Timestamp::from_ymd(2020, 1, 1),
            end: Timestamp::from_ymd(2023, 1, 1),
        })
    }

    pub fn target(&self, f: File) -> u64 {
        self.targets[f as usize]
    }

    pub fn with_span(mut self, start: Timestamp, end: Timestamp) -> Self {
        self.start = start;
        self.end = end;
        self
    }
}

impl FromStr for ScaleFactorSpec {
    type Err = DatagenError;
    fn from_str(s: &str) -> Result<Self, DatagenError> {
        ScaleFactorSpec::builtin(s).ok_or_else(|| {
            DatagenError::Config(format!(
                "unknown scale factor {s:?}; expected one of {}",
                NAMES.join(", ")
            ))
        })
    }
}
