//! Quantitative heuristics: cost/benefit payback, expert-time banding,
//! interface effort, coverage multipliers and risk contingency.
//!
//! The arithmetic is generic over [`Scalar`]; [`Calculator`] adapts it to
//! knowledge-base values for `compute` bindings.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::kb::{AttrType, Value};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalcError {
    #[error("no conversion rate for currency `{0}`")]
    MissingRate(String),
    #[error("input out of domain: {0}")]
    Domain(String),
    #[error("invalid cost model: {0}")]
    InvalidModel(String),
    #[error("bad calculator input: {0}")]
    Input(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostItem<S> {
    pub label: String,
    pub amount: S,
    pub currency: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostModel<S> {
    /// Development effort in person-months.
    pub dev_effort_months: S,
    /// Notional salary per person-year, base currency.
    pub salary_rate: S,
    pub software_items: Vec<CostItem<S>>,
    pub hardware_cost: S,
    /// Replacement cycle in years; required when `hardware_cost > 0`.
    pub hardware_replacement_years: Option<S>,
    /// Knowledge-base maintenance per year, base currency.
    pub kb_maintenance: S,
    pub base_currency: String,
    /// Multiplier converting one unit of a currency into the base currency.
    pub currency_rates: BTreeMap<String, S>,
}

impl<S: Scalar> CostModel<S> {
    fn check(&self) -> Result<(), CalcError> {
        let money = [("salary_rate", self.salary_rate), ("hardware_cost", self.hardware_cost), ("kb_maintenance", self.kb_maintenance)];
        for (name, v) in money {
            if !(v >= S::zero()) {
                return Err(CalcError::InvalidModel(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(self.dev_effort_months >= S::zero()) {
            return Err(CalcError::InvalidModel(format!("dev_effort must be non-negative, got {}", self.dev_effort_months)));
        }
        if let Some(item) = self.software_items.iter().find(|i| !(i.amount >= S::zero())) {
            return Err(CalcError::InvalidModel(format!("software item `{}` has negative amount", item.label)));
        }
        if self.hardware_cost > S::zero() && !self.hardware_replacement_years.is_some_and(|y| y >= S::one()) {
            return Err(CalcError::InvalidModel("hardware needs a replacement cycle of at least one year".into()));
        }
        Ok(())
    }

    fn to_base(&self, item: &CostItem<S>) -> Result<S, CalcError> {
        if item.currency == self.base_currency {
            return Ok(item.amount);
        }
        self.currency_rates
            .get(&item.currency)
            .map(|rate| item.amount * *rate)
            .ok_or_else(|| CalcError::MissingRate(item.currency.clone()))
    }
}

/// Up-front investment: labour at the notional salary plus converted
/// software and hardware.
pub fn development_cost<S: Scalar>(m: &CostModel<S>) -> Result<S, CalcError> {
    m.check()?;
    let labour = m.dev_effort_months / S::lit(12.0) * m.salary_rate;
    let mut software = S::zero();
    for item in &m.software_items {
        software = software + m.to_base(item)?;
    }
    Ok(labour + software + m.hardware_cost)
}

/// Yearly running cost: maintenance plus hardware amortised over its
/// replacement cycle.
pub fn annual_recurring_cost<S: Scalar>(m: &CostModel<S>) -> Result<S, CalcError> {
    m.check()?;
    for item in &m.software_items {
        m.to_base(item)?;
    }
    let hardware = match m.hardware_replacement_years {
        Some(years) if m.hardware_cost > S::zero() => m.hardware_cost / years,
        _ => S::zero(),
    };
    Ok(m.kb_maintenance + hardware)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenefitItem<S> {
    pub label: String,
    pub annual: S,
    pub citation: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BenefitModel<S> {
    pub annual_items: Vec<BenefitItem<S>>,
}

impl<S: Scalar> BenefitModel<S> {
    pub fn annual_total(&self) -> S {
        self.annual_items.iter().fold(S::zero(), |acc, i| acc + i.annual)
    }
}

/// Months until the investment is recovered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payback<S> {
    Months(S),
    Never,
}

impl<S: Scalar> Payback<S> {
    pub fn months(self) -> Option<S> {
        match self {
            Payback::Months(m) => Some(m),
            Payback::Never => None,
        }
    }

    /// Months, with `Never` as positive infinity.
    pub fn as_scalar(self) -> S {
        self.months().unwrap_or_else(S::infinity)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaybackResult<S> {
    pub initial_investment: S,
    pub annual_net_benefit: S,
    pub payback: Payback<S>,
}

/// `12 * initial / (benefit - cost)` when the net annual benefit is positive.
pub fn payback_months<S: Scalar>(initial: S, annual_benefit: S, annual_cost: S) -> Payback<S> {
    let net = annual_benefit - annual_cost;
    if net > S::zero() {
        Payback::Months(S::lit(12.0) * initial / net)
    } else {
        Payback::Never
    }
}

/// Full cost/benefit evaluation of a model pair.
pub fn evaluate_payback<S: Scalar>(cost: &CostModel<S>, benefit: &BenefitModel<S>) -> Result<PaybackResult<S>, CalcError> {
    let initial = development_cost(cost)?;
    let running = annual_recurring_cost(cost)?;
    let annual = benefit.annual_total();
    Ok(PaybackResult {
        initial_investment: initial,
        annual_net_benefit: annual - running,
        payback: payback_months(initial, annual, running),
    })
}

/// Rounds half-up to the nearest multiple of `step`.
pub fn round_to_nearest<S: Scalar>(amount: S, step: S) -> S {
    (amount / step + S::lit(0.5)).floor() * step
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeBand {
    TooFast,
    Suitable,
    Decompose,
}

impl TimeBand {
    pub fn as_str(self) -> &'static str {
        match self {
            TimeBand::TooFast => "too_fast",
            TimeBand::Suitable => "suitable",
            TimeBand::Decompose => "decompose",
        }
    }
}

/// Classifies how long an expert takes to solve one case. The suitable band
/// is the closed interval 3 to 60 minutes.
pub fn expert_time_band<S: Scalar>(minutes: S) -> Result<TimeBand, CalcError> {
    if !(minutes > S::zero()) {
        return Err(CalcError::Domain(format!("expert time must be positive, got {minutes}")));
    }
    Ok(if minutes < S::lit(3.0) {
        TimeBand::TooFast
    } else if minutes <= S::lit(60.0) {
        TimeBand::Suitable
    } else {
        TimeBand::Decompose
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterfaceProfile {
    EmbeddedOrSimple,
    MultipleOrImpressive,
}

impl InterfaceProfile {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "embedded_or_simple" => Some(Self::EmbeddedOrSimple),
            "multiple_or_impressive" => Some(Self::MultipleOrImpressive),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionInterval<S> {
    pub low: S,
    pub high: S,
}

impl<S: Scalar> FractionInterval<S> {
    pub fn midpoint(self) -> S {
        (self.low + self.high) / S::lit(2.0)
    }
}

/// Share of project time to budget for interfaces.
pub fn interface_effort_fraction<S: Scalar>(profile: InterfaceProfile) -> FractionInterval<S> {
    match profile {
        InterfaceProfile::EmbeddedOrSimple => FractionInterval { low: S::lit(0.10), high: S::lit(0.15) },
        InterfaceProfile::MultipleOrImpressive => FractionInterval { low: S::lit(0.30), high: S::lit(0.50) },
    }
}

/// Effort relative to an 80%-coverage system, interpolated linearly between
/// 80% coverage (1x) and full coverage (5x).
pub fn coverage_effort_multiplier<S: Scalar>(coverage: S) -> Result<S, CalcError> {
    let lo = S::lit(0.8);
    if !(coverage >= lo && coverage <= S::one()) {
        return Err(CalcError::Domain(format!("coverage must lie in [0.8, 1.0], got {coverage}")));
    }
    Ok(S::one() + (coverage - lo) / (S::one() - lo) * S::lit(4.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Low,
    Medium,
    High,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Low, Level::Medium, Level::High];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "low" => Some(Level::Low),
            "medium" => Some(Level::Medium),
            "high" => Some(Level::High),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Low => "low",
            Level::Medium => "medium",
            Level::High => "high",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RiskItem {
    pub label: String,
    pub likelihood: Level,
    pub impact: Level,
    pub contingency: Option<String>,
}

impl RiskItem {
    pub fn new(label: impl Into<String>, likelihood: Level, impact: Level) -> Self {
        Self { label: label.into(), likelihood, impact, contingency: None }
    }

    /// Medium-or-high on both axes.
    pub fn is_serious(&self) -> bool {
        self.likelihood >= Level::Medium && self.impact >= Level::Medium
    }
}

/// Default number of serious risks that calls for contingency planning.
pub const DEFAULT_CONTINGENCY_THRESHOLD: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyCheck {
    pub required: bool,
    pub serious: Vec<RiskItem>,
}

pub fn contingency_required(risks: &[RiskItem], threshold: usize) -> ContingencyCheck {
    let serious: Vec<RiskItem> = risks.iter().filter(|r| r.is_serious()).cloned().collect();
    ContingencyCheck { required: serious.len() >= threshold, serious }
}

/// Shape a calculator input or output must have.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Number,
    Bool,
    /// An enumeration declaring at least these values.
    Enum(&'static [&'static str]),
}

impl Slot {
    pub fn accepts(self, kind: &AttrType) -> bool {
        match (self, kind) {
            (Slot::Number, AttrType::Number { .. }) | (Slot::Bool, AttrType::Bool) => true,
            (Slot::Enum(required), AttrType::Enum { values }) => {
                required.iter().all(|r| values.iter().any(|v| v == r))
            }
            _ => false,
        }
    }

    pub fn describe(self) -> String {
        match self {
            Slot::Number => "number".into(),
            Slot::Bool => "bool".into(),
            Slot::Enum(vs) => format!("enum with values ({})", vs.join(", ")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Fixed(&'static [Slot]),
    /// Any number of repetitions of the group.
    Repeated(&'static [Slot]),
}

const LEVELS: Slot = Slot::Enum(&["low", "medium", "high"]);
const BANDS: &[&str] = &["too_fast", "suitable", "decompose"];
const PROFILES: &[&str] = &["embedded_or_simple", "multiple_or_impressive"];

/// The calculators that `compute` statements may reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Calculator {
    DevelopmentCost,
    AnnualCost,
    PaybackMonths,
    ExpertTimeBand,
    InterfaceFraction,
    CoverageMultiplier,
    ContingencyRequired,
}

impl Calculator {
    pub const ALL: [Calculator; 7] = [
        Calculator::DevelopmentCost,
        Calculator::AnnualCost,
        Calculator::PaybackMonths,
        Calculator::ExpertTimeBand,
        Calculator::InterfaceFraction,
        Calculator::CoverageMultiplier,
        Calculator::ContingencyRequired,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Calculator::DevelopmentCost => "development_cost",
            Calculator::AnnualCost => "annual_cost",
            Calculator::PaybackMonths => "payback_months",
            Calculator::ExpertTimeBand => "expert_time_band",
            Calculator::InterfaceFraction => "interface_fraction",
            Calculator::CoverageMultiplier => "coverage_multiplier",
            Calculator::ContingencyRequired => "contingency_required",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.id() == id)
    }

    /// Inputs, in binding order.
    ///
    /// `development_cost(effort_months, salary_per_year, software_cost,
    /// software_units_per_base, hardware_cost)`;
    /// `annual_cost(maintenance_per_year, hardware_cost, replacement_years)`;
    /// `payback_months(initial, annual_benefit, annual_cost)`;
    /// `contingency_required(likelihood, impact, ...)`.
    pub fn inputs(self) -> Arity {
        use Slot::*;
        match self {
            Calculator::DevelopmentCost => Arity::Fixed(&[Number, Number, Number, Number, Number]),
            Calculator::AnnualCost | Calculator::PaybackMonths => Arity::Fixed(&[Number, Number, Number]),
            Calculator::ExpertTimeBand | Calculator::CoverageMultiplier => Arity::Fixed(&[Number]),
            Calculator::InterfaceFraction => Arity::Fixed(&[Enum(PROFILES)]),
            Calculator::ContingencyRequired => Arity::Repeated(&[LEVELS, LEVELS]),
        }
    }

    pub fn output(self) -> Slot {
        match self {
            Calculator::ExpertTimeBand => Slot::Enum(BANDS),
            Calculator::ContingencyRequired => Slot::Bool,
            _ => Slot::Number,
        }
    }

    /// Runs the calculator on resolved input values.
    pub fn apply(self, inputs: &[Value]) -> Result<Value, CalcError> {
        let num = |i: usize| -> Result<f64, CalcError> {
            inputs
                .get(i)
                .and_then(Value::as_number)
                .ok_or_else(|| CalcError::Input(format!("{}: input {} must be a number", self.id(), i + 1)))
        };
        match self {
            Calculator::DevelopmentCost => {
                let rate = num(3)?;
                if !(rate > 0.0) {
                    return Err(CalcError::Domain(format!("exchange rate must be positive, got {rate}")));
                }
                let model = CostModel {
                    dev_effort_months: num(0)?,
                    salary_rate: num(1)?,
                    software_items: vec![CostItem { label: "software".into(), amount: num(2)?, currency: "software".into() }],
                    hardware_cost: num(4)?,
                    // only running costs use the replacement cycle
                    hardware_replacement_years: Some(1.0),
                    kb_maintenance: 0.0,
                    base_currency: "base".into(),
                    currency_rates: BTreeMap::from([("software".to_string(), 1.0 / rate)]),
                };
                development_cost(&model).map(Value::Number)
            }
            Calculator::AnnualCost => {
                let hardware = num(1)?;
                let years = num(2)?;
                let model = CostModel {
                    dev_effort_months: 0.0,
                    salary_rate: 0.0,
                    software_items: Vec::new(),
                    hardware_cost: hardware,
                    hardware_replacement_years: (hardware > 0.0).then_some(years),
                    kb_maintenance: num(0)?,
                    base_currency: "base".into(),
                    currency_rates: BTreeMap::new(),
                };
                annual_recurring_cost(&model).map(Value::Number)
            }
            Calculator::PaybackMonths => {
                let initial = num(0)?;
                if !(initial >= 0.0) {
                    return Err(CalcError::Domain(format!("initial investment must be non-negative, got {initial}")));
                }
                Ok(Value::Number(payback_months(initial, num(1)?, num(2)?).as_scalar()))
            }
            Calculator::ExpertTimeBand => expert_time_band(num(0)?).map(|b| Value::Symbol(b.as_str().into())),
            Calculator::InterfaceFraction => {
                let profile = inputs
                    .first()
                    .and_then(Value::as_symbol)
                    .and_then(InterfaceProfile::parse)
                    .ok_or_else(|| CalcError::Input("interface_fraction: unknown interface profile".into()))?;
                Ok(Value::Number(interface_effort_fraction::<f64>(profile).midpoint()))
            }
            Calculator::CoverageMultiplier => coverage_effort_multiplier(num(0)?).map(Value::Number),
            Calculator::ContingencyRequired => {
                let risks = risk_items(&[], inputs)?;
                Ok(Value::Bool(contingency_required(&risks, DEFAULT_CONTINGENCY_THRESHOLD).required))
            }
        }
    }
}

/// Pairs up (likelihood, impact) values into risk items. `labels` supplies
/// one label per pair; missing labels are numbered.
pub fn risk_items(labels: &[String], inputs: &[Value]) -> Result<Vec<RiskItem>, CalcError> {
    if inputs.len() % 2 != 0 {
        return Err(CalcError::Input("risk inputs must come in likelihood/impact pairs".into()));
    }
    let level = |v: &Value| {
        v.as_symbol()
            .and_then(Level::parse)
            .ok_or_else(|| CalcError::Input(format!("`{v}` is not a risk level")))
    };
    inputs
        .chunks(2)
        .enumerate()
        .map(|(i, pair)| {
            let label = labels.get(i).cloned().unwrap_or_else(|| format!("risk_{}", i + 1));
            Ok(RiskItem::new(label, level(&pair[0])?, level(&pair[1])?))
        })
        .collect()
}

impl fmt::Display for Calculator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn icl() -> CostModel<f64> {
        CostModel {
            dev_effort_months: 6.0,
            salary_rate: 50_000.0,
            software_items: vec![CostItem { label: "hardware and software".into(), amount: 5_000.0, currency: "GBP".into() }],
            hardware_cost: 0.0,
            hardware_replacement_years: None,
            kb_maintenance: 5_000.0,
            base_currency: "GBP".into(),
            currency_rates: BTreeMap::new(),
        }
    }

    fn thyroid() -> CostModel<f64> {
        CostModel {
            dev_effort_months: 9.0,
            salary_rate: 60_000.0,
            software_items: vec![
                CostItem { label: "development licence".into(), amount: 10_000.0, currency: "USD".into() },
                CostItem { label: "runtime licence".into(), amount: 6_000.0, currency: "USD".into() },
            ],
            hardware_cost: 3_000.0,
            hardware_replacement_years: Some(3.0),
            kb_maintenance: 7_500.0,
            base_currency: "GBP".into(),
            currency_rates: BTreeMap::from([("USD".to_string(), 1.0 / 2.2857)]),
        }
    }

    #[test]
    fn icl_costs() {
        assert_eq!(development_cost(&icl()).unwrap(), 30_000.0);
        assert_eq!(annual_recurring_cost(&icl()).unwrap(), 5_000.0);
        let Payback::Months(m) = payback_months(30_000.0f64, 140_000.0, 5_000.0) else { panic!() };
        assert!((m - 2.67).abs() <= 0.01);
    }

    #[test]
    fn thyroid_costs() {
        let dev = development_cost(&thyroid()).unwrap();
        assert!((dev - 55_000.0).abs() <= 100.0, "{dev}");
        assert_eq!(annual_recurring_cost(&thyroid()).unwrap(), 8_500.0);
        assert_eq!(round_to_nearest(8_500.0, 1_000.0), 9_000.0);
        assert_eq!(round_to_nearest(dev, 1_000.0), 55_000.0);
        let m = payback_months(dev, 600_000.0, 8_500.0).months().unwrap();
        assert!((m - 1.12).abs() <= 0.01 && m < 2.0);
        let m = payback_months(55_000.0f64, 600_000.0, 9_000.0).months().unwrap();
        assert!((m - 1.12).abs() <= 0.01);
    }

    #[test]
    fn degenerate_models() {
        let m = CostModel { hardware_cost: 3_000.0, hardware_replacement_years: Some(3.0), ..CostModel::<f64>::zero() };
        assert_eq!(development_cost(&m).unwrap(), 3_000.0);
        assert_eq!(annual_recurring_cost(&CostModel::<f64>::zero()).unwrap(), 0.0);
    }

    #[test]
    fn missing_rate_names_currency() {
        let mut m = thyroid();
        m.currency_rates.clear();
        assert_eq!(development_cost(&m), Err(CalcError::MissingRate("USD".into())));
    }

    #[test]
    fn hardware_without_cycle_is_invalid() {
        let m = CostModel { hardware_cost: 1.0, ..CostModel::<f64>::zero() };
        assert!(matches!(development_cost(&m), Err(CalcError::InvalidModel(_))));
    }

    #[test]
    fn payback_never() {
        assert_eq!(payback_months(10_000.0, 1_000.0, 5_000.0), Payback::Never);
        assert_eq!(payback_months(10_000.0, 5_000.0, 5_000.0), Payback::Never);
    }

    #[test]
    fn bands() {
        assert_eq!(expert_time_band(2.0).unwrap(), TimeBand::TooFast);
        assert_eq!(expert_time_band(3.0).unwrap(), TimeBand::Suitable);
        assert_eq!(expert_time_band(45.0).unwrap(), TimeBand::Suitable);
        assert_eq!(expert_time_band(60.0).unwrap(), TimeBand::Suitable);
        assert_eq!(expert_time_band(90.0).unwrap(), TimeBand::Decompose);
        assert!(expert_time_band(0.0).is_err());
        assert!(expert_time_band(-5.0f32).is_err());
    }

    #[test]
    fn interface_fractions() {
        let s = interface_effort_fraction::<f64>(InterfaceProfile::EmbeddedOrSimple);
        assert_eq!((s.low, s.high), (0.10, 0.15));
        let m = interface_effort_fraction::<f64>(InterfaceProfile::MultipleOrImpressive);
        assert_eq!((m.low, m.high), (0.30, 0.50));
        assert!((m.midpoint() - 0.40).abs() < 1e-12);
    }

    #[test]
    fn coverage_anchors() {
        assert_eq!(coverage_effort_multiplier(0.8).unwrap(), 1.0);
        assert_eq!(coverage_effort_multiplier(1.0).unwrap(), 5.0);
        assert!((coverage_effort_multiplier(0.9f64).unwrap() - 3.0).abs() < 1e-12);
        assert!(coverage_effort_multiplier(0.79).is_err());
        assert!(coverage_effort_multiplier(1.01).is_err());
        assert_eq!(coverage_effort_multiplier(1.0f32).unwrap(), 5.0f32);
    }

    #[test]
    fn contingency() {
        let two = [RiskItem::new("a", Level::Medium, Level::High), RiskItem::new("b", Level::High, Level::Medium)];
        let c = contingency_required(&two, DEFAULT_CONTINGENCY_THRESHOLD);
        assert!(c.required);
        assert_eq!(c.serious.len(), 2);
        assert!(!contingency_required(&[RiskItem::new("a", Level::Low, Level::High)], 2).required);
        assert!(!contingency_required(&[], 2).required);
        assert!(contingency_required(&two[..1], 1).required);
    }

    #[test]
    fn calculator_ids_round_trip() {
        for c in Calculator::ALL {
            assert_eq!(Calculator::from_id(c.id()), Some(c));
        }
        assert_eq!(Calculator::from_id("npv"), None);
    }

    #[test]
    fn value_adapters() {
        let n = Value::Number;
        let dev = Calculator::DevelopmentCost.apply(&[n(9.0), n(60_000.0), n(16_000.0), n(2.2857), n(3_000.0)]).unwrap();
        assert!((dev.as_number().unwrap() - 55_000.0).abs() < 100.0);
        assert_eq!(Calculator::AnnualCost.apply(&[n(5_000.0), n(0.0), n(0.0)]).unwrap(), n(5_000.0));
        assert_eq!(Calculator::AnnualCost.apply(&[n(7_500.0), n(3_000.0), n(3.0)]).unwrap(), n(8_500.0));
        assert_eq!(Calculator::PaybackMonths.apply(&[n(1.0), n(0.0), n(1.0)]).unwrap(), n(f64::INFINITY));
        assert_eq!(
            Calculator::ExpertTimeBand.apply(&[n(45.0)]).unwrap(),
            Value::Symbol("suitable".into())
        );
        let lvl = |s: &str| Value::Symbol(s.into());
        assert_eq!(
            Calculator::ContingencyRequired.apply(&[lvl("medium"), lvl("high"), lvl("high"), lvl("medium")]).unwrap(),
            Value::Bool(true)
        );
        assert!(Calculator::CoverageMultiplier.apply(&[n(0.5)]).is_err());
    }

    impl CostModel<f64> {
        fn zero() -> Self {
            CostModel {
                dev_effort_months: 0.0,
                salary_rate: 0.0,
                software_items: Vec::new(),
                hardware_cost: 0.0,
                hardware_replacement_years: None,
                kb_maintenance: 0.0,
                base_currency: "GBP".into(),
                currency_rates: BTreeMap::new(),
            }
        }
    }
}
