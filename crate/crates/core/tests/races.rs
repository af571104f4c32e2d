mod common;

use common::*;
use easytime::agents_io::{write_event_log, write_results};
use easytime::runtime::{results, EventOutcome, GroupBy};

#[test]
fn ironman_matches_hand_simulation() {
    let race =
        Scenario::load("ironman.ez", "ironman_runners.csv").replay(&events("ironman_events.log"));
    let mut oracle = csv::Reader::from_path(fixture("ironman_expected.csv")).unwrap();
    let header = oracle.headers().unwrap().clone();
    for row in oracle.records() {
        let row = row.unwrap();
        for (var, want) in header.iter().zip(row.iter()).skip(1) {
            assert_eq!(
                race.value(&row[0], var),
                Some(want.parse().unwrap()),
                "{}.{var}",
                &row[0]
            );
        }
    }
}

#[test]
fn cyclocross_finish_times() {
    let race = Scenario::load("cyclocross.ez", "cyclocross_runners.csv")
        .replay(&events("cyclocross_events.log"));
    // Fourth, sixth and ninth crossing of either mat, worked out by hand.
    // Everyone rides nine laps, so the counter runs on past zero.
    for (rfid, bike, round) in [
        ("C01", 240100, -5),
        ("C02", 240200, -5),
        ("C03", 360300, -3),
        ("C04", 360400, -3),
        ("C05", 540500, 0),
        ("C06", 540600, 0),
    ] {
        assert_eq!(race.value(rfid, "BIKE"), Some(bike), "{rfid}");
        assert_eq!(race.value(rfid, "ROUND1"), Some(round), "{rfid}");
    }
}

#[test]
fn biathlon_penalties_and_finish() {
    let race = Scenario::load("biathlon.ez", "biathlon_runners.csv")
        .replay(&events("biathlon_events.log"));
    assert_eq!(race.value("BI01", "PENALTY"), Some(1));
    assert_eq!(race.value("BI02", "PENALTY"), Some(0));
    assert_eq!(race.value("BI01", "RUN"), Some(500000));
    assert_eq!(race.value("BI02", "RUN"), Some(510000));
    assert!(race.warnings.is_empty(), "{:?}", race.warnings);
}

#[test]
fn grouped_results_on_disk() {
    let race = Scenario::load("cyclocross.ez", "cyclocross_runners.csv")
        .replay(&events("cyclocross_events.log"));
    let dir = tempfile::tempdir().unwrap();
    let tables = results(&race, Some("BIKE"), Some(GroupBy::Category)).unwrap();
    let mut names: Vec<String> = write_results(&tables, dir.path())
        .unwrap()
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["results_cat1.csv", "results_cat2.csv", "results_cat3.csv"]
    );
    let cat3 = std::fs::read_to_string(dir.path().join("results_cat3.csv")).unwrap();
    assert_eq!(
        cat3,
        "rank,id,last_name,first_name,gender,category,BIKE,ROUND1\n\
         1,5,Rider5,R5,female,3,540500,0\n\
         2,6,Rider6,R6,male,3,540600,0\n"
    );
}

#[test]
fn unknown_tags_are_logged_not_fatal() {
    let scenario = Scenario::load("biathlon.ez", "biathlon_runners.csv");
    let mut evs = events("biathlon_events.log");
    evs.push(easytime::runtime::Event::new(3, "STRANGER", 1));
    let race = scenario.replay(&evs);
    assert_eq!(race.log[0].outcome, EventOutcome::Unmatched);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("log.csv");
    write_event_log(&race.log, &path).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert!(
        text.lines()
            .nth(1)
            .unwrap()
            .contains("STRANGER,1,,unmatched"),
        "{text}"
    );
}
