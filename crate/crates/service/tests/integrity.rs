mod common;

use std::sync::{Arc, Barrier};

use common::{local_engines, Client, TestServer};
use qalam_core::samples::{HOBBIES_CLEAN, HOBBIES_DRAFT, HOBBIES_REVISED};
use qalam_store::Submission;
use serde_json::{json, Value};

/// Populates users, a custom prompt, essays and revisions; returns the
/// GET paths that cover every stored entity.
fn populate(c: &Client) -> Vec<String> {
    let mut paths = vec!["/prompts".to_string()];
    let (_, p) = c.post(
        "/prompts",
        json!({"level": "C1", "topic": "Technology", "genre": "formal", "body_ar": "ما أثر التكنولوجيا على التعليم؟", "min_words": 200, "media_ref": "img/tech.png"}),
    );
    paths.push(format!("/prompts/{}", p["id"].as_str().unwrap()));
    let texts = [HOBBIES_DRAFT, HOBBIES_REVISED, HOBBIES_CLEAN, "أحب القراءه كثيرا."];
    for (k, prompt) in ["sports-and-hobbies", "family-and-friends", p["id"].as_str().unwrap()].iter().enumerate() {
        let (_, user) = c.post("/users", json!({"native_language": "Korean", "self_level": "A2"}));
        let uid = user["user_id"].as_str().unwrap().to_string();
        c.patch(&format!("/users/{uid}/profile"), json!({"dialect": "Gulf", "locale": "en"}));
        paths.push(format!("/users/{uid}"));
        paths.push(format!("/users/{uid}/essays"));
        let (_, essay) = c.post("/essays", json!({"user_id": uid, "prompt_id": prompt}));
        let eid = essay["essay_id"].as_str().unwrap().to_string();
        for text in &texts[..=k + 1] {
            assert_eq!(c.check(&eid, text).0, 201);
        }
        paths.push(format!("/essays/{eid}"));
        paths.push(format!("/essays/{eid}/submissions"));
        paths.push(format!("/essays/{eid}/progress"));
        paths.push(format!("/essays/{eid}/submissions/1"));
    }
    paths
}

fn snapshot(c: &Client, paths: &[String]) -> Vec<(u16, Value)> {
    paths.iter().map(|p| c.get(p)).collect()
}

#[test]
fn restart_reads_back_identical_entities() {
    let dir = tempfile::tempdir().unwrap();
    let server = TestServer::start(dir.path(), local_engines());
    let paths = populate(&server.client());
    let before = snapshot(&server.client(), &paths);
    assert!(before.iter().all(|(s, _)| *s == 200));
    server.stop();

    let server = TestServer::start(dir.path(), local_engines());
    let after = snapshot(&server.client(), &paths);
    assert_eq!(before, after);
}

#[test]
fn concurrent_checks_get_consecutive_revisions() {
    let dir = tempfile::tempdir().unwrap();
    let server = TestServer::start(dir.path(), local_engines());
    let essay = server.client().new_essay("sports-and-hobbies");
    let barrier = Arc::new(Barrier::new(32));
    let handles: Vec<_> = (0..32)
        .map(|k| {
            let c = server.client();
            let essay = essay.clone();
            let barrier = barrier.clone();
            std::thread::spawn(move || {
                barrier.wait();
                let text = if k % 2 == 0 { HOBBIES_DRAFT } else { HOBBIES_REVISED };
                let (status, sub) = c.check(&essay, text);
                assert_eq!(status, 201, "{sub}");
                sub["revision_no"].as_u64().unwrap()
            })
        })
        .collect();
    let mut revs: Vec<u64> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    revs.sort();
    assert_eq!(revs, (1..=32).collect::<Vec<_>>());

    let (_, stored) = server.client().get(&format!("/essays/{essay}/submissions"));
    let stored: Vec<Submission> = serde_json::from_value(stored).unwrap();
    assert_eq!(stored.iter().map(|s| s.revision_no as u64).collect::<Vec<_>>(), (1..=32).collect::<Vec<_>>());
}

#[test]
fn stored_feedback_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let server = TestServer::start(dir.path(), local_engines());
    let c = server.client();
    populate(&c);
    let service = server.service.clone().unwrap();
    let mut checked = 0;
    for essay in service.store().essays() {
        for sub in service.store().submissions(&essay.essay_id) {
            assert_eq!(service.engines().evaluate(&sub.text).unwrap(), sub.feedback);
            // Over HTTP: a fresh check of the same text yields the same feedback.
            let (_, again) = c.check(&essay.essay_id, &sub.text);
            let again: Submission = serde_json::from_value(again).unwrap();
            assert_eq!(again.feedback, sub.feedback);
            checked += 1;
        }
    }
    assert_eq!(checked, 2 + 3 + 4);
}
