//! CSV and JSON persistence for datasets, recommendations, and reports.
//!
//! All text formats are UTF-8 CSV with a mandatory header row. Loaders trim
//! whitespace, reject rows that cannot produce a valid record, and report
//! the offending line. Metric reports carry their judgment settings and
//! notes as `#`-prefixed comment lines above the CSV header so a report
//! file round-trips through the reader; numbers round-trip at six decimal
//! places.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use csv::{ReaderBuilder, Trim, WriterBuilder};

use crate::error::Error;
use crate::evaluation::{Method, MetricsReport, MetricsRow, RelevanceCriteria, RelevanceMode};
use crate::hybrid::Recommendation;
use crate::model::{
    ConferenceConfig, ContactRecord, Dataset, Epoch, ParticipantId, PersonalityTrait,
    PersonalityVector,
};

pub const CONTACTS_HEADER: [&str; 5] = [
    "participant_a",
    "participant_b",
    "epoch",
    "duration_minutes",
    "frequency",
];

pub const PROFILES_HEADER: [&str; 6] = [
    "participant_id",
    "openness",
    "extroversion",
    "agreeableness",
    "conscientiousness",
    "neuroticism",
];

pub const RECOMMENDATIONS_HEADER: [&str; 6] =
    ["for", "suggested", "score", "tie", "personality", "bucket"];

pub const REPORT_HEADER: [&str; 8] = [
    "method",
    "beta",
    "bucket",
    "accuracy",
    "mae",
    "nmae",
    "recommendation_count",
    "successful_count",
];

/// Serialization target for metric reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::UnknownReportFormat {
                token: s.to_owned(),
            }),
        }
    }
}

fn malformed(line: u64, message: impl Into<String>) -> Error {
    Error::MalformedRow {
        line,
        message: message.into(),
    }
}

fn reader(r: impl Read) -> csv::Reader<impl Read> {
    ReaderBuilder::new()
        .has_headers(true)
        .trim(Trim::All)
        .from_reader(r)
}

fn check_header(headers: &csv::StringRecord, expected: &[&str], what: &str) -> Result<(), Error> {
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(malformed(
            1,
            format!(
                "{what} header must be `{}`, got `{}`",
                expected.join(","),
                got.join(",")
            ),
        ));
    }
    Ok(())
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

/// Parses the contacts CSV format. Fails on the first malformed row with
/// its line number; an empty data section is an empty list.
pub fn read_contacts(r: impl Read) -> Result<Vec<ContactRecord>, Error> {
    let mut rdr = reader(r);
    check_header(rdr.headers()?, &CONTACTS_HEADER, "contacts")?;

    let mut contacts = Vec::new();
    let mut seen: BTreeMap<(String, String, Epoch), u64> = BTreeMap::new();
    for result in rdr.records() {
        let record = result?;
        let line = record_line(&record);
        if record.len() != CONTACTS_HEADER.len() {
            return Err(malformed(
                line,
                format!(
                    "expected {} fields, got {}",
                    CONTACTS_HEADER.len(),
                    record.len()
                ),
            ));
        }
        let a = &record[0];
        let b = &record[1];
        if a.is_empty() || b.is_empty() {
            return Err(malformed(line, "empty participant id"));
        }
        let epoch: Epoch = record[2]
            .parse()
            .map_err(|_| malformed(line, format!("unknown epoch `{}`", &record[2])))?;
        let duration_minutes: f64 = record[3]
            .parse()
            .map_err(|_| malformed(line, format!("unparseable duration `{}`", &record[3])))?;
        if !duration_minutes.is_finite() || duration_minutes < 0.0 {
            return Err(malformed(
                line,
                format!("duration must be a non-negative real, got {duration_minutes}"),
            ));
        }
        let frequency: u32 = record[4]
            .parse()
            .map_err(|_| malformed(line, format!("unparseable frequency `{}`", &record[4])))?;

        if a != b {
            let key = if a < b {
                (a.to_owned(), b.to_owned(), epoch)
            } else {
                (b.to_owned(), a.to_owned(), epoch)
            };
            if let Some(first_line) = seen.insert(key, line) {
                return Err(malformed(
                    line,
                    format!(
                        "duplicate {epoch} contact for ({a}, {b}), first seen on line {first_line}"
                    ),
                ));
            }
        }

        contacts.push(ContactRecord {
            participant_a: ParticipantId::new(a),
            participant_b: ParticipantId::new(b),
            epoch,
            duration_minutes,
            frequency,
        });
    }
    Ok(contacts)
}

pub fn write_contacts(w: impl Write, contacts: &[ContactRecord]) -> Result<(), Error> {
    let mut wtr = WriterBuilder::new().from_writer(w);
    wtr.write_record(CONTACTS_HEADER)?;
    for c in contacts {
        wtr.write_record([
            c.participant_a.as_str(),
            c.participant_b.as_str(),
            c.epoch.as_str(),
            &format!("{}", c.duration_minutes),
            &format!("{}", c.frequency),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Parses the profiles CSV format, rejecting out-of-range ratings and
/// duplicate participant ids with line-numbered errors.
pub fn read_profiles(r: impl Read) -> Result<BTreeMap<ParticipantId, PersonalityVector>, Error> {
    let mut rdr = reader(r);
    check_header(rdr.headers()?, &PROFILES_HEADER, "profiles")?;

    let mut profiles = BTreeMap::new();
    for result in rdr.records() {
        let record = result?;
        let line = record_line(&record);
        if record.len() != PROFILES_HEADER.len() {
            return Err(malformed(
                line,
                format!(
                    "expected {} fields, got {}",
                    PROFILES_HEADER.len(),
                    record.len()
                ),
            ));
        }
        let id = &record[0];
        if id.is_empty() {
            return Err(malformed(line, "empty participant id"));
        }
        let mut ratings = [0u8; 5];
        for (slot, trait_name) in PersonalityTrait::ALL.into_iter().enumerate() {
            let raw = &record[slot + 1];
            let value: u8 = raw
                .parse()
                .map_err(|_| malformed(line, format!("unparseable {trait_name} rating `{raw}`")))?;
            if !(PersonalityVector::RATING_MIN..=PersonalityVector::RATING_MAX).contains(&value) {
                return Err(malformed(
                    line,
                    format!("{trait_name} rating {value} out of range 1..=5"),
                ));
            }
            ratings[slot] = value;
        }
        let vector =
            PersonalityVector::new(ratings[0], ratings[1], ratings[2], ratings[3], ratings[4]);
        if profiles.insert(ParticipantId::new(id), vector).is_some() {
            return Err(malformed(line, format!("duplicate participant {id}")));
        }
    }
    Ok(profiles)
}

pub fn write_profiles(
    w: impl Write,
    profiles: &BTreeMap<ParticipantId, PersonalityVector>,
) -> Result<(), Error> {
    let mut wtr = WriterBuilder::new().from_writer(w);
    wtr.write_record(PROFILES_HEADER)?;
    for (id, p) in profiles {
        let mut record = vec![id.as_str().to_owned()];
        record.extend(p.as_array().map(|r| r.to_string()));
        wtr.write_record(&record)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Assembles a dataset from the two CSV streams. The roster is the set of
/// profiled participants; validity beyond parse errors is the caller's
/// concern via dataset validation.
pub fn load_dataset(
    contacts: impl Read,
    profiles: impl Read,
    config: ConferenceConfig,
) -> Result<Dataset, Error> {
    let contacts = read_contacts(contacts)?;
    let profiles = read_profiles(profiles)?;
    let participants: Vec<ParticipantId> = profiles.keys().cloned().collect();
    Ok(Dataset {
        participants,
        profiles,
        contacts,
        config,
    })
}

pub fn write_recommendations(w: impl Write, recs: &[Recommendation]) -> Result<(), Error> {
    let mut wtr = WriterBuilder::new().from_writer(w);
    wtr.write_record(RECOMMENDATIONS_HEADER)?;
    for rec in recs {
        wtr.write_record([
            rec.for_participant.as_str(),
            rec.suggested.as_str(),
            &format!("{:.6}", rec.merged_score),
            &format!("{:.6}", rec.tie_component),
            &format!("{:.6}", rec.personality_component),
            &format!("{:.1}", rec.bucket),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

const META_RELEVANCE_MODE: &str = "relevance_mode";
const META_TAU: &str = "tau";
const META_RATING_MIN: &str = "rating_min";
const META_RATING_MAX: &str = "rating_max";
const META_NOTE: &str = "note";

/// Renders a report as CSV: `#`-prefixed metadata lines (judgment settings
/// and notes), then the header, then one data line per row.
pub fn report_to_csv(report: &MetricsReport) -> Result<Vec<u8>, Error> {
    let mut out = String::new();
    out.push_str(&format!(
        "# {META_RELEVANCE_MODE}: {}\n",
        report.criteria.mode
    ));
    out.push_str(&format!("# {META_TAU}: {}\n", report.criteria.tau));
    out.push_str(&format!("# {META_RATING_MIN}: {}\n", report.rating_min));
    out.push_str(&format!("# {META_RATING_MAX}: {}\n", report.rating_max));
    for note in &report.notes {
        out.push_str(&format!("# {META_NOTE}: {note}\n"));
    }

    let mut bytes = out.into_bytes();
    let mut wtr = WriterBuilder::new().from_writer(&mut bytes);
    wtr.write_record(REPORT_HEADER)?;
    for row in &report.rows {
        wtr.write_record([
            row.method.as_str(),
            &format!("{}", row.beta),
            &format!("{:.1}", row.bucket),
            &format!("{:.6}", row.accuracy),
            &format!("{:.6}", row.mae),
            &format!("{:.6}", row.nmae),
            &format!("{}", row.recommendation_count),
            &format!("{}", row.successful_count),
        ])?;
    }
    wtr.flush()?;
    drop(wtr);
    Ok(bytes)
}

fn report_meta_error(message: impl Into<String>) -> Error {
    Error::MalformedReport {
        message: message.into(),
    }
}

fn parse_meta_f64(value: &str, key: &str) -> Result<f64, Error> {
    value
        .parse()
        .map_err(|_| report_meta_error(format!("unparseable {key} `{value}`")))
}

/// Reads a report written by [`report_to_csv`].
pub fn report_from_csv(r: impl Read) -> Result<MetricsReport, Error> {
    let mut text = String::new();
    let mut r = r;
    r.read_to_string(&mut text)?;

    let mut mode: Option<RelevanceMode> = None;
    let mut tau: Option<f64> = None;
    let mut rating_min: Option<f64> = None;
    let mut rating_max: Option<f64> = None;
    let mut notes: Vec<String> = Vec::new();
    let mut data_lines: Vec<&str> = Vec::new();

    for line in text.lines() {
        let comment = match line.strip_prefix('#') {
            Some(comment) if data_lines.is_empty() => comment,
            _ => {
                data_lines.push(line);
                continue;
            }
        };
        let comment = comment.trim();
        let (key, value) = comment.split_once(": ").ok_or_else(|| {
            report_meta_error(format!(
                "metadata line `{comment}` has no `key: value` shape"
            ))
        })?;
        match key {
            META_RELEVANCE_MODE => {
                mode =
                    Some(value.parse().map_err(|_| {
                        report_meta_error(format!("unknown relevance mode `{value}`"))
                    })?)
            }
            META_TAU => tau = Some(parse_meta_f64(value, META_TAU)?),
            META_RATING_MIN => rating_min = Some(parse_meta_f64(value, META_RATING_MIN)?),
            META_RATING_MAX => rating_max = Some(parse_meta_f64(value, META_RATING_MAX)?),
            META_NOTE => notes.push(value.to_owned()),
            _ => return Err(report_meta_error(format!("unknown metadata key `{key}`"))),
        }
    }

    let criteria = RelevanceCriteria {
        mode: mode.ok_or_else(|| report_meta_error("missing relevance_mode metadata"))?,
        tau: tau.ok_or_else(|| report_meta_error("missing tau metadata"))?,
    };
    let rating_min = rating_min.ok_or_else(|| report_meta_error("missing rating_min metadata"))?;
    let rating_max = rating_max.ok_or_else(|| report_meta_error("missing rating_max metadata"))?;

    let data = data_lines.join("\n");
    let mut rdr = reader(data.as_bytes());
    check_header(rdr.headers()?, &REPORT_HEADER, "report")?;

    let mut rows = Vec::new();
    for result in rdr.records() {
        let record = result?;
        if record.len() != REPORT_HEADER.len() {
            return Err(report_meta_error(format!(
                "expected {} fields, got {}",
                REPORT_HEADER.len(),
                record.len()
            )));
        }
        let method: Method = record[0]
            .parse()
            .map_err(|_| report_meta_error(format!("unknown method `{}`", &record[0])))?;
        let parse_f64 = |i: usize| -> Result<f64, Error> {
            record[i].parse().map_err(|_| {
                report_meta_error(format!("unparseable {} `{}`", REPORT_HEADER[i], &record[i]))
            })
        };
        let parse_usize = |i: usize| -> Result<usize, Error> {
            record[i].parse().map_err(|_| {
                report_meta_error(format!("unparseable {} `{}`", REPORT_HEADER[i], &record[i]))
            })
        };
        rows.push(MetricsRow {
            method,
            beta: parse_f64(1)?,
            bucket: parse_f64(2)?,
            accuracy: parse_f64(3)?,
            mae: parse_f64(4)?,
            nmae: parse_f64(5)?,
            recommendation_count: parse_usize(6)?,
            successful_count: parse_usize(7)?,
        });
    }

    Ok(MetricsReport {
        criteria,
        rating_min,
        rating_max,
        rows,
        notes,
    })
}

pub fn report_to_json(report: &MetricsReport) -> Result<Vec<u8>, Error> {
    let mut bytes = serde_json::to_vec_pretty(report)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn report_from_json(r: impl Read) -> Result<MetricsReport, Error> {
    Ok(serde_json::from_reader(r)?)
}

/// Serializes a report in the requested format with stable column order.
pub fn export_report(report: &MetricsReport, format: ReportFormat) -> Result<Vec<u8>, Error> {
    match format {
        ReportFormat::Csv => report_to_csv(report),
        ReportFormat::Json => report_to_json(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_dataset;
    use crate::synth::{generate_synthetic, SynthesisParams};

    fn sample_report() -> MetricsReport {
        MetricsReport {
            criteria: RelevanceCriteria {
                mode: RelevanceMode::Either,
                tau: 0.5,
            },
            rating_min: 1.0,
            rating_max: 5.0,
            rows: vec![
                MetricsRow {
                    method: Method::Sparp,
                    beta: 0.1,
                    bucket: 0.8,
                    accuracy: 0.036,
                    mae: 0.964,
                    nmae: 0.241,
                    recommendation_count: 250,
                    successful_count: 9,
                },
                MetricsRow {
                    method: Method::C2,
                    beta: 0.3,
                    bucket: 1.0,
                    accuracy: 1.0 / 3.0,
                    mae: 2.0 / 3.0,
                    nmae: 1.0 / 6.0,
                    recommendation_count: 3,
                    successful_count: 1,
                },
            ],
            notes: vec!["c1 beta=0.1 bucket=0.9: no recommendations".to_owned()],
        }
    }

    #[test]
    fn contacts_round_trip_preserves_records() {
        let d = generate_synthetic(&SynthesisParams::for_population(12)).unwrap();
        let mut bytes = Vec::new();
        write_contacts(&mut bytes, &d.contacts).unwrap();
        let parsed = read_contacts(bytes.as_slice()).unwrap();
        assert_eq!(parsed, d.contacts);
    }

    #[test]
    fn profiles_round_trip_preserves_vectors() {
        let d = generate_synthetic(&SynthesisParams::for_population(12)).unwrap();
        let mut bytes = Vec::new();
        write_profiles(&mut bytes, &d.profiles).unwrap();
        let parsed = read_profiles(bytes.as_slice()).unwrap();
        assert_eq!(parsed, d.profiles);
    }

    #[test]
    fn contact_parsing_reads_the_documented_shape() {
        let text = "participant_a,participant_b,epoch,duration_minutes,frequency\nA,B,past,80,7\n";
        let contacts = read_contacts(text.as_bytes()).unwrap();
        assert_eq!(
            contacts,
            vec![ContactRecord {
                participant_a: ParticipantId::new("A"),
                participant_b: ParticipantId::new("B"),
                epoch: Epoch::Past,
                duration_minutes: 80.0,
                frequency: 7,
            }]
        );
    }

    #[test]
    fn empty_contact_files_parse_to_empty_lists() {
        let text = "participant_a,participant_b,epoch,duration_minutes,frequency\n";
        assert_eq!(read_contacts(text.as_bytes()).unwrap(), Vec::new());
    }

    #[test]
    fn contact_errors_carry_line_numbers() {
        let header = "participant_a,participant_b,epoch,duration_minutes,frequency\n";

        let bad_epoch = format!("{header}A,B,yesterday,80,7\n");
        match read_contacts(bad_epoch.as_bytes()) {
            Err(Error::MalformedRow { line: 2, message }) => {
                assert!(message.contains("unknown epoch"), "message: {message}");
            }
            other => panic!("expected line-2 epoch error, got {other:?}"),
        }

        let bad_duration = format!("{header}A,B,past,-3,7\n");
        assert!(matches!(
            read_contacts(bad_duration.as_bytes()),
            Err(Error::MalformedRow { line: 2, .. })
        ));

        let duplicate = format!("{header}A,B,past,10,1\nB,A,past,20,2\n");
        match read_contacts(duplicate.as_bytes()) {
            Err(Error::MalformedRow { line: 3, message }) => {
                assert!(message.contains("duplicate"), "message: {message}");
            }
            other => panic!("expected line-3 duplicate error, got {other:?}"),
        }

        let bad_header = "who,whom,when,how_long,how_often\nA,B,past,10,1\n";
        assert!(matches!(
            read_contacts(bad_header.as_bytes()),
            Err(Error::MalformedRow { line: 1, .. })
        ));
    }

    #[test]
    fn profile_errors_carry_line_numbers() {
        let header =
            "participant_id,openness,extroversion,agreeableness,conscientiousness,neuroticism\n";

        let out_of_range = format!("{header}A,3,4,2,5,6\n");
        match read_profiles(out_of_range.as_bytes()) {
            Err(Error::MalformedRow { line: 2, message }) => {
                assert!(message.contains("out of range"), "message: {message}");
            }
            other => panic!("expected line-2 range error, got {other:?}"),
        }

        let duplicate = format!("{header}A,3,4,2,5,1\nA,1,1,1,1,1\n");
        assert!(matches!(
            read_profiles(duplicate.as_bytes()),
            Err(Error::MalformedRow { line: 3, .. })
        ));
    }

    #[test]
    fn loaded_datasets_validate_cleanly() {
        let d = generate_synthetic(&SynthesisParams::for_population(15)).unwrap();
        let mut contacts = Vec::new();
        let mut profiles = Vec::new();
        write_contacts(&mut contacts, &d.contacts).unwrap();
        write_profiles(&mut profiles, &d.profiles).unwrap();

        let loaded = load_dataset(
            contacts.as_slice(),
            profiles.as_slice(),
            ConferenceConfig::default(),
        )
        .unwrap();
        assert_eq!(loaded, d);
        assert_eq!(validate_dataset(&loaded), Vec::new());
    }

    #[test]
    fn recommendations_render_fixed_precision_rows() {
        let recs = vec![Recommendation {
            for_participant: ParticipantId::new("A"),
            suggested: ParticipantId::new("B"),
            merged_score: 1.777777777,
            tie_component: 0.777777777,
            personality_component: 1.0,
            bucket: 1.8,
        }];
        let mut bytes = Vec::new();
        write_recommendations(&mut bytes, &recs).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(
            text,
            "for,suggested,score,tie,personality,bucket\nA,B,1.777778,0.777778,1.000000,1.8\n"
        );
    }

    #[test]
    fn csv_report_round_trips_at_six_decimals() {
        let report = sample_report();
        let bytes = report_to_csv(&report).unwrap();
        let parsed = report_from_csv(bytes.as_slice()).unwrap();

        assert_eq!(parsed.criteria, report.criteria);
        assert_eq!(parsed.rating_min, report.rating_min);
        assert_eq!(parsed.rating_max, report.rating_max);
        assert_eq!(parsed.notes, report.notes);
        assert_eq!(parsed.rows.len(), report.rows.len());
        for (got, want) in parsed.rows.iter().zip(&report.rows) {
            assert_eq!(got.method, want.method);
            assert_eq!(got.beta, want.beta);
            assert_eq!(got.bucket, want.bucket);
            assert!((got.accuracy - want.accuracy).abs() < 5e-7);
            assert!((got.mae - want.mae).abs() < 5e-7);
            assert!((got.nmae - want.nmae).abs() < 5e-7);
            assert_eq!(got.recommendation_count, want.recommendation_count);
            assert_eq!(got.successful_count, want.successful_count);
        }

        let reexported = report_to_csv(&parsed).unwrap();
        assert_eq!(reexported, bytes);
    }

    #[test]
    fn empty_reports_export_a_bare_header() {
        let mut report = sample_report();
        report.rows.clear();
        report.notes.clear();
        let bytes = report_to_csv(&report).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data, vec![REPORT_HEADER.join(",")]);
        assert_eq!(report_from_csv(bytes.as_slice()).unwrap(), report);
    }

    #[test]
    fn json_report_round_trips_exactly() {
        let report = sample_report();
        let bytes = report_to_json(&report).unwrap();
        assert_eq!(report_from_json(bytes.as_slice()).unwrap(), report);
    }

    #[test]
    fn report_metadata_errors_are_descriptive() {
        let missing_tau = "# relevance_mode: either\nmethod,beta,bucket,accuracy,mae,nmae,recommendation_count,successful_count\n";
        match report_from_csv(missing_tau.as_bytes()) {
            Err(Error::MalformedReport { message }) => {
                assert!(message.contains("tau"), "message: {message}");
            }
            other => panic!("expected metadata error, got {other:?}"),
        }

        let bad_mode = "# relevance_mode: sometimes\n# tau: 0.5\n# rating_min: 1\n# rating_max: 5\nmethod,beta,bucket,accuracy,mae,nmae,recommendation_count,successful_count\n";
        assert!(matches!(
            report_from_csv(bad_mode.as_bytes()),
            Err(Error::MalformedReport { .. })
        ));
    }

    #[test]
    fn export_format_tokens_parse_and_print() {
        assert_eq!("csv".parse::<ReportFormat>().unwrap(), ReportFormat::Csv);
        assert_eq!("json".parse::<ReportFormat>().unwrap(), ReportFormat::Json);
        assert!(matches!(
            "yaml".parse::<ReportFormat>(),
            Err(Error::UnknownReportFormat { .. })
        ));
        let report = sample_report();
        assert_eq!(
            export_report(&report, ReportFormat::Csv).unwrap(),
            report_to_csv(&report).unwrap()
        );
        assert_eq!(
            export_report(&report, ReportFormat::Json).unwrap(),
            report_to_json(&report).unwrap()
        );
    }
}
