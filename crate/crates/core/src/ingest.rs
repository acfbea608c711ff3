//! Station-record ingestion: CSV parsing, daily snapshot selection, circular
//! wind encoding, and construction of the 14-day-lagged feature table.
//!
//! The station CSV format is UTF-8 with a header row containing at least the
//! columns `date,hour,air_temp,wind_dir,wind_speed,dew_point,rel_humidity,
//! pressure,visibility` (extra columns are ignored). Dates are ISO-8601,
//! hours are local solar time 0..=23, and a missing measurement is an empty
//! cell or the sentinel `M`. Unparseable measurement cells are treated as
//! missing, not as errors.

use std::collections::BTreeMap;
use std::io::Read;

use chrono::{Datelike, Duration, NaiveDate};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Columns that must be present in a station CSV header.
pub const REQUIRED_COLUMNS: [&str; 9] = [
    "date",
    "hour",
    "air_temp",
    "wind_dir",
    "wind_speed",
    "dew_point",
    "rel_humidity",
    "pressure",
    "visibility",
];

/// Predictor columns of a feature table, in export order.
pub const FEATURE_NAMES: [&str; 7] = [
    "day_counter",
    "lag_temp",
    "lag_wind_cos",
    "lag_wind_sin",
    "lag_wind_speed",
    "lag_dew_point",
    "lag_rel_humidity",
];

/// One hourly station report. Measurements are optional; a present wind
/// direction is normalized into `[0, 360)` and physically implausible values
/// (negative wind speed, humidity outside `[0, 100]`, dew point more than
/// 0.5 degrees above air temperature) are demoted to missing.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherRecord {
    pub date: NaiveDate,
    pub hour: u8,
    pub air_temp: Option<f64>,
    pub wind_dir: Option<f64>,
    pub wind_speed: Option<f64>,
    pub dew_point: Option<f64>,
    pub rel_humidity: Option<f64>,
    pub pressure: Option<f64>,
    pub visibility: Option<f64>,
}

impl WeatherRecord {
    fn sanitize(mut self) -> Self {
        if let Some(d) = self.wind_dir {
            self.wind_dir = Some(d.rem_euclid(360.0));
        }
        if self.wind_speed.is_some_and(|w| w < 0.0) {
            self.wind_speed = None;
        }
        if self.rel_humidity.is_some_and(|h| !(0.0..=100.0).contains(&h)) {
            self.rel_humidity = None;
        }
        if let (Some(dp), Some(t)) = (self.dew_point, self.air_temp) {
            if dp > t + 0.5 {
                self.dew_point = None;
            }
        }
        self
    }
}

/// The selected snapshot for one calendar date. `air_temp` doubles as that
/// date's response value; pressure and visibility are dropped here because
/// they are never emitted as features.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyObservation {
    pub date: NaiveDate,
    pub day_of_year: u32,
    pub air_temp: Option<f64>,
    pub wind_dir: Option<f64>,
    pub wind_speed: Option<f64>,
    pub dew_point: Option<f64>,
    pub rel_humidity: Option<f64>,
}

impl DailyObservation {
    /// The 2 p.m. temperature snapshot used as the response at this date.
    pub fn response_temp(&self) -> Option<f64> {
        self.air_temp
    }
}

/// Date-keyed daily observations. The map normalizes input order, so feature
/// construction is invariant to permutations of the raw records.
#[derive(Debug, Clone, Default)]
pub struct DailySeries {
    observations: BTreeMap<NaiveDate, DailyObservation>,
}

impl DailySeries {
    pub fn from_observations(obs: impl IntoIterator<Item = DailyObservation>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for o in obs {
            if map.insert(o.date, o.clone()).is_some() {
                return Err(Error::Format(format!(
                    "duplicate daily observation for {}",
                    o.date
                )));
            }
        }
        Ok(Self { observations: map })
    }

    pub fn get(&self, date: NaiveDate) -> Option<&DailyObservation> {
        self.observations.get(&date)
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn min_date(&self) -> Option<NaiveDate> {
        self.observations.keys().next().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &DailyObservation> {
        self.observations.values()
    }

    /// True when at least one observation falls inside `[from, to]`.
    pub fn any_in_range(&self, from: NaiveDate, to: NaiveDate) -> bool {
        self.observations.range(from..=to).next().is_some()
    }
}

/// Which split a feature table belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YearRole {
    Train,
    Calibration,
    Test,
}

impl YearRole {
    pub fn as_str(self) -> &'static str {
        match self {
            YearRole::Train => "train",
            YearRole::Calibration => "calibration",
            YearRole::Test => "test",
        }
    }
}

/// Response at date `t` paired with predictors observed `lag_days` earlier.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub date: NaiveDate,
    pub day_counter: u32,
    pub lag_temp: f64,
    pub lag_wind_cos: f64,
    pub lag_wind_sin: f64,
    pub lag_wind_speed: f64,
    pub lag_dew_point: f64,
    pub lag_rel_humidity: f64,
    pub response: f64,
}

/// Complete-case feature rows for one target year, dates strictly increasing.
#[derive(Debug, Clone)]
pub struct FeatureTable {
    pub year: i32,
    pub role: YearRole,
    pub rows: Vec<FeatureRow>,
    /// Target-year dates dropped for a missing response or missing lagged
    /// predictor. `rows.len() + excluded` equals the number of calendar days.
    pub excluded: usize,
}

impl FeatureTable {
    /// Numeric view with the documented predictor column order.
    pub fn to_dataset(&self) -> Result<Dataset> {
        let n = self.rows.len();
        let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(n); FEATURE_NAMES.len()];
        let mut responses = Vec::with_capacity(n);
        let mut dates = Vec::with_capacity(n);
        for r in &self.rows {
            cols[0].push(r.day_counter as f64);
            cols[1].push(r.lag_temp);
            cols[2].push(r.lag_wind_cos);
            cols[3].push(r.lag_wind_sin);
            cols[4].push(r.lag_wind_speed);
            cols[5].push(r.lag_dew_point);
            cols[6].push(r.lag_rel_humidity);
            responses.push(r.response);
            dates.push(r.date);
        }
        Dataset::new(
            FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            cols,
            responses,
            Some(dates),
        )
    }
}

fn parse_cell(raw: &str) -> Option<f64> {
    let cleaned = raw.trim().replace('\u{2212}', "-");
    if cleaned.is_empty() || cleaned == "M" {
        return None;
    }
    match cleaned.parse::<f64>() {
        Ok(v) if v.is_finite() => Some(v),
        _ => None,
    }
}

/// Parse station records from a CSV byte stream.
///
/// Rows come back in file order, one record per data row. A malformed header
/// or an empty stream is an error; an unreadable measurement cell is just a
/// missing value. Malformed `date` or `hour` cells are errors because they
/// identify the record.
pub fn parse_records<R: Read>(source: R) -> Result<Vec<WeatherRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(source);
    let headers = reader
        .headers()
        .map_err(|e| Error::Format(format!("unreadable CSV header: {e}")))?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].trim().is_empty()) {
        return Err(Error::EmptyInput("station CSV has no header row".into()));
    }
    let mut index = BTreeMap::new();
    for (i, name) in headers.iter().enumerate() {
        index.insert(name.trim().to_string(), i);
    }
    for required in REQUIRED_COLUMNS {
        if !index.contains_key(required) {
            return Err(Error::Format(format!(
                "station CSV header is missing required column '{required}'"
            )));
        }
    }
    let col = |name: &str| index[name];
    let (c_date, c_hour) = (col("date"), col("hour"));
    let measurement_cols: Vec<usize> = REQUIRED_COLUMNS[2..].iter().map(|c| col(c)).collect();

    let mut out = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            Error::Format(format!("unreadable CSV record at data row {}: {e}", row_no + 1))
        })?;
        let get = |i: usize| record.get(i).unwrap_or("");
        let date = NaiveDate::parse_from_str(get(c_date).trim(), "%Y-%m-%d").map_err(|_| {
            Error::Format(format!(
                "data row {}: date '{}' is not ISO-8601",
                row_no + 1,
                get(c_date)
            ))
        })?;
        let hour: u8 = get(c_hour).trim().parse().ok().filter(|h| *h < 24).ok_or_else(|| {
            Error::Format(format!(
                "data row {}: hour '{}' is not an integer in 0..=23",
                row_no + 1,
                get(c_hour)
            ))
        })?;
        let m: Vec<Option<f64>> = measurement_cols.iter().map(|&i| parse_cell(get(i))).collect();
        out.push(
            WeatherRecord {
                date,
                hour,
                air_temp: m[0],
                wind_dir: m[1],
                wind_speed: m[2],
                dew_point: m[3],
                rel_humidity: m[4],
                pressure: m[5],
                visibility: m[6],
            }
            .sanitize(),
        );
    }
    if out.is_empty() && headers.iter().all(|h| h.trim().is_empty()) {
        return Err(Error::EmptyInput("station CSV contains no data".into()));
    }
    Ok(out)
}

/// Select one observation per calendar date: the record whose hour is nearest
/// `target_hour` within `tolerance_hours`, ties broken toward the earlier
/// record. Dates without a qualifying record are simply absent from the
/// result; missingness is data, not an error.
pub fn select_daily(
    records: &[WeatherRecord],
    target_hour: u8,
    tolerance_hours: u8,
) -> Vec<DailyObservation> {
    let mut sorted: Vec<&WeatherRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.date, r.hour));

    let mut out: Vec<DailyObservation> = Vec::new();
    let mut best: Option<(&WeatherRecord, u8)> = None;
    let mut flush = |best: &mut Option<(&WeatherRecord, u8)>, out: &mut Vec<DailyObservation>| {
        if let Some((r, _)) = best.take() {
            out.push(DailyObservation {
                date: r.date,
                day_of_year: r.date.ordinal(),
                air_temp: r.air_temp,
                wind_dir: r.wind_dir,
                wind_speed: r.wind_speed,
                dew_point: r.dew_point,
                rel_humidity: r.rel_humidity,
            });
        }
    };
    let mut current_date: Option<NaiveDate> = None;
    for r in sorted {
        if current_date != Some(r.date) {
            flush(&mut best, &mut out);
            current_date = Some(r.date);
        }
        let dist = r.hour.abs_diff(target_hour);
        if dist > tolerance_hours {
            continue;
        }
        // Strict comparison keeps the earlier record on distance ties.
        if best.as_ref().is_none_or(|&(_, d)| dist < d) {
            best = Some((r, dist));
        }
    }
    flush(&mut best, &mut out);
    out
}

/// Unit-circle encoding of a wind direction given in degrees:
/// `(cos(theta * pi / 180), sin(theta * pi / 180))`.
pub fn encode_wind(theta_degrees: f64) -> Result<(f64, f64)> {
    if !theta_degrees.is_finite() {
        return Err(Error::Domain(format!(
            "wind direction must be finite, got {theta_degrees}"
        )));
    }
    let radians = theta_degrees.to_radians();
    Ok((radians.cos(), radians.sin()))
}

fn encode_wind_opt(theta: Option<f64>) -> Option<(f64, f64)> {
    theta.and_then(|t| encode_wind(t).ok())
}

/// Build the lagged feature table for one target year.
///
/// Every calendar date of the year is considered. A date is dropped (and
/// counted in the exclusion tally) when its own response or any retained
/// predictor at `date - lag_days` is missing. When the data contain nothing
/// at all in the `lag_days` window before January 1, the year's head cannot
/// be lagged and a boundary error names the affected dates.
pub fn build_features(
    series: &DailySeries,
    target_year: i32,
    role: YearRole,
    lag_days: u32,
) -> Result<FeatureTable> {
    let jan1 = NaiveDate::from_ymd_opt(target_year, 1, 1)
        .ok_or_else(|| Error::Config(format!("invalid year {target_year}")))?;
    let dec31 = NaiveDate::from_ymd_opt(target_year, 12, 31).unwrap();
    let lag = Duration::days(lag_days as i64);

    if lag_days > 0 && !series.any_in_range(jan1 - lag, jan1 - Duration::days(1)) {
        let dates: Vec<NaiveDate> = (0..lag_days as i64)
            .map(|k| jan1 + Duration::days(k))
            .collect();
        return Err(Error::BoundaryData { dates });
    }

    let mut rows = Vec::new();
    let mut excluded = 0usize;
    let mut date = jan1;
    while date <= dec31 {
        match feature_row(series, date, lag) {
            Some(row) => rows.push(row),
            None => excluded += 1,
        }
        date += Duration::days(1);
    }
    Ok(FeatureTable {
        year: target_year,
        role,
        rows,
        excluded,
    })
}

fn feature_row(series: &DailySeries, date: NaiveDate, lag: Duration) -> Option<FeatureRow> {
    let target = series.get(date)?;
    let response = target.response_temp()?;
    let source = series.get(date - lag)?;
    let (lag_wind_cos, lag_wind_sin) = encode_wind_opt(source.wind_dir)?;
    Some(FeatureRow {
        date,
        day_counter: date.ordinal(),
        lag_temp: source.air_temp?,
        lag_wind_cos,
        lag_wind_sin,
        lag_wind_speed: source.wind_speed?,
        lag_dew_point: source.dew_point?,
        lag_rel_humidity: source.rel_humidity?,
        response,
    })
}

/// Number of calendar days in a year (366 on leap years).
pub fn days_in_year(year: i32) -> u32 {
    if NaiveDate::from_ymd_opt(year, 2, 29).is_some() {
        366
    } else {
        365
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(date: &str, hour: u8, temp: f64) -> WeatherRecord {
        WeatherRecord {
            date: date.parse().unwrap(),
            hour,
            air_temp: Some(temp),
            wind_dir: Some(180.0),
            wind_speed: Some(3.0),
            dew_point: Some(temp - 2.0),
            rel_humidity: Some(70.0),
            pressure: None,
            visibility: None,
        }
    }

    const HEADER: &str =
        "date,hour,air_temp,wind_dir,wind_speed,dew_point,rel_humidity,pressure,visibility\n";

    #[test]
    fn parses_a_plain_row() {
        // The minus in the temperature is U+2212, as station exports sometimes use.
        let csv = format!("{HEADER}2023-01-05,14,\u{2212}3.2,270,4.1,-5.0,81,1013.2,9000\n");
        let records = parse_records(csv.as_bytes()).unwrap();
        assert_eq!(records.len(), 1);
        let r = &records[0];
        assert_eq!(r.air_temp, Some(-3.2));
        assert_eq!(r.wind_dir, Some(270.0));
        assert_eq!(r.hour, 14);
        assert_eq!(r.pressure, Some(1013.2));
    }

    #[test]
    fn missing_sentinel_and_unparseable_cells_become_missing() {
        let csv = format!("{HEADER}2023-01-05,14,M,,abc,1.0,150,,\n");
        let r = &parse_records(csv.as_bytes()).unwrap()[0];
        assert_eq!(r.air_temp, None);
        assert_eq!(r.wind_dir, None);
        assert_eq!(r.wind_speed, None); // "abc" unparseable
        assert_eq!(r.rel_humidity, None); // 150 outside [0, 100]
        // dew point cannot be checked against a missing temperature
        assert_eq!(r.dew_point, Some(1.0));
    }

    #[test]
    fn dew_point_above_air_temp_is_demoted() {
        let csv = format!("{HEADER}2023-01-05,14,-3.0,10,1,0.5,50,,\n");
        let r = &parse_records(csv.as_bytes()).unwrap()[0];
        assert_eq!(r.dew_point, None);
        // within the 0.5 degree tolerance it is kept
        let csv = format!("{HEADER}2023-01-05,14,-3.0,10,1,-2.6,50,,\n");
        let r = &parse_records(csv.as_bytes()).unwrap()[0];
        assert_eq!(r.dew_point, Some(-2.6));
    }

    #[test]
    fn wind_direction_normalized_into_circle() {
        let csv = format!("{HEADER}2023-01-05,14,0,360,1,-1,50,,\n2023-01-06,14,0,-90,1,-1,50,,\n");
        let records = parse_records(csv.as_bytes()).unwrap();
        assert_eq!(records[0].wind_dir, Some(0.0));
        assert_eq!(records[1].wind_dir, Some(270.0));
    }

    #[test]
    fn header_only_gives_empty_sequence() {
        let records = parse_records(HEADER.as_bytes()).unwrap();
        assert!(records.is_empty());
    }

    #[test]
    fn empty_file_is_empty_input_error() {
        assert!(matches!(parse_records(&b""[..]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn missing_column_named_in_error() {
        let bad = "date,hour,air_temp,wind_dir,wind_speed,dew_point,rel_humidity,pressure\n";
        match parse_records(bad.as_bytes()) {
            Err(Error::Format(msg)) => assert!(msg.contains("visibility"), "{msg}"),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_columns_ignored() {
        let csv = "station,date,hour,air_temp,wind_dir,wind_speed,dew_point,rel_humidity,pressure,visibility,qc_flag\n\
                   LYR,2023-01-05,14,1.5,90,2,0,60,,,ok\n";
        let r = &parse_records(csv.as_bytes()).unwrap()[0];
        assert_eq!(r.air_temp, Some(1.5));
    }

    #[test]
    fn select_prefers_exact_hour() {
        let records = vec![record("2023-03-01", 13, 1.0), record("2023-03-01", 14, 2.0)];
        let daily = select_daily(&records, 14, 1);
        assert_eq!(daily.len(), 1);
        assert_eq!(daily[0].air_temp, Some(2.0));
    }

    #[test]
    fn select_breaks_distance_tie_toward_earlier() {
        let records = vec![record("2023-03-01", 13, 1.0), record("2023-03-01", 15, 2.0)];
        let daily = select_daily(&records, 14, 1);
        assert_eq!(daily[0].air_temp, Some(1.0));
    }

    #[test]
    fn select_outside_tolerance_marks_date_missing() {
        let records = vec![record("2023-03-01", 9, 1.0), record("2023-03-02", 14, 2.0)];
        let daily = select_daily(&records, 14, 1);
        assert_eq!(daily.len(), 1);
        assert_eq!(daily[0].date.to_string(), "2023-03-02");
    }

    #[test]
    fn select_is_input_order_invariant() {
        let mut records = vec![
            record("2023-03-02", 14, 5.0),
            record("2023-03-01", 15, 2.0),
            record("2023-03-01", 13, 1.0),
        ];
        let a = select_daily(&records, 14, 1);
        records.reverse();
        let b = select_daily(&records, 14, 1);
        assert_eq!(a, b);
    }

    #[test]
    fn wind_encoding_axes() {
        let (c, s) = encode_wind(0.0).unwrap();
        assert_eq!((c, s), (1.0, 0.0));
        let (c, s) = encode_wind(90.0).unwrap();
        assert!(c.abs() < 1e-15 && (s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wind_encoding_pair_disambiguates_mirrored_sines() {
        let (c30, s30) = encode_wind(30.0).unwrap();
        let (c150, s150) = encode_wind(150.0).unwrap();
        assert!((s30 - 0.5).abs() < 1e-12 && (s150 - 0.5).abs() < 1e-12);
        assert!((c30 - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((c150 + 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn wind_encoding_on_unit_circle() {
        for i in 0..1000 {
            let theta = (i as f64 * 7.919) % 360.0;
            let (c, s) = encode_wind(theta).unwrap();
            assert!((c * c + s * s - 1.0).abs() < 1e-9);
        }
        assert!(encode_wind(f64::NAN).is_err());
    }

    fn full_obs(date: NaiveDate, temp: f64) -> DailyObservation {
        DailyObservation {
            date,
            day_of_year: date.ordinal(),
            air_temp: Some(temp),
            wind_dir: Some(45.0),
            wind_speed: Some(5.0),
            dew_point: Some(temp - 1.0),
            rel_humidity: Some(80.0),
        }
    }

    fn series_over(from: &str, to: &str) -> DailySeries {
        let from: NaiveDate = from.parse().unwrap();
        let to: NaiveDate = to.parse().unwrap();
        let mut obs = Vec::new();
        let mut d = from;
        while d <= to {
            // encode the date into the temperature so lag sources are identifiable
            let stamp = (d - NaiveDate::from_ymd_opt(2020, 1, 1).unwrap()).num_days() as f64;
            obs.push(full_obs(d, stamp));
            d += Duration::days(1);
        }
        DailySeries::from_observations(obs).unwrap()
    }

    #[test]
    fn year_boundary_lag_reaches_previous_december() {
        let series = series_over("2021-12-01", "2022-12-31");
        let table = build_features(&series, 2022, YearRole::Calibration, 14).unwrap();
        let jan5 = table
            .rows
            .iter()
            .find(|r| r.date.to_string() == "2022-01-05")
            .unwrap();
        let dec22: NaiveDate = "2021-12-22".parse().unwrap();
        let expected = (dec22 - NaiveDate::from_ymd_opt(2020, 1, 1).unwrap()).num_days() as f64;
        assert_eq!(jan5.lag_temp, expected);
    }

    #[test]
    fn interior_lag_is_same_year() {
        let series = series_over("2021-12-18", "2022-12-31");
        let table = build_features(&series, 2022, YearRole::Calibration, 14).unwrap();
        let jul20 = table
            .rows
            .iter()
            .find(|r| r.date.to_string() == "2022-07-20")
            .unwrap();
        let jul6: NaiveDate = "2022-07-06".parse().unwrap();
        let expected = (jul6 - NaiveDate::from_ymd_opt(2020, 1, 1).unwrap()).num_days() as f64;
        assert_eq!(jul20.lag_temp, expected);
    }

    #[test]
    fn missing_tail_is_boundary_error_naming_dates() {
        let series = series_over("2022-01-01", "2022-12-31");
        match build_features(&series, 2022, YearRole::Calibration, 14) {
            Err(Error::BoundaryData { dates }) => {
                assert_eq!(dates.len(), 14);
                assert_eq!(dates[0].to_string(), "2022-01-01");
                assert_eq!(dates[13].to_string(), "2022-01-14");
            }
            other => panic!("expected boundary error, got {other:?}"),
        }
    }

    #[test]
    fn rows_plus_exclusions_cover_the_year() {
        let mut obs: Vec<DailyObservation> = series_over("2021-12-18", "2022-12-31")
            .iter()
            .cloned()
            .collect();
        // hole in March plus a missing lagged wind speed in June
        obs.retain(|o| o.date.to_string() != "2022-03-10");
        for o in obs.iter_mut() {
            if o.date.to_string() == "2022-06-01" {
                o.wind_speed = None;
            }
        }
        let series = DailySeries::from_observations(obs).unwrap();
        let table = build_features(&series, 2022, YearRole::Train, 14).unwrap();
        // 2022-03-10 itself, its 14-day-later dependent, and 2022-06-15
        assert_eq!(table.excluded, 3);
        assert_eq!(table.rows.len() + table.excluded, 365);
        assert!(table.rows.iter().all(|r| r.date.to_string() != "2022-06-15"));
    }

    #[test]
    fn lag_relationship_holds_for_every_row() {
        let series = series_over("2021-12-10", "2022-12-31");
        let table = build_features(&series, 2022, YearRole::Test, 14).unwrap();
        let epoch = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        for r in &table.rows {
            let source_stamp = r.lag_temp as i64;
            let source_date = epoch + Duration::days(source_stamp);
            assert_eq!(source_date + Duration::days(14), r.date);
        }
        // dates strictly increasing
        for w in table.rows.windows(2) {
            assert!(w[0].date < w[1].date);
        }
    }

    #[test]
    fn leap_year_day_counter_reaches_366() {
        let series = series_over("2023-12-10", "2024-12-31");
        let table = build_features(&series, 2024, YearRole::Test, 14).unwrap();
        assert_eq!(table.rows.last().unwrap().day_counter, 366);
        assert_eq!(days_in_year(2024), 366);
        assert_eq!(days_in_year(2023), 365);
    }

    #[test]
    fn permuted_input_builds_identical_table() {
        let obs: Vec<DailyObservation> = series_over("2021-12-10", "2022-12-31")
            .iter()
            .cloned()
            .collect();
        let mut permuted = obs.clone();
        permuted.reverse();
        permuted.swap(5, 100);
        let a = build_features(
            &DailySeries::from_observations(obs).unwrap(),
            2022,
            YearRole::Train,
            14,
        )
        .unwrap();
        let b = build_features(
            &DailySeries::from_observations(permuted).unwrap(),
            2022,
            YearRole::Train,
            14,
        )
        .unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.excluded, b.excluded);
    }

    #[test]
    fn duplicate_dates_rejected() {
        let d: NaiveDate = "2022-05-01".parse().unwrap();
        let err = DailySeries::from_observations(vec![full_obs(d, 1.0), full_obs(d, 2.0)]);
        assert!(err.is_err());
    }
}
