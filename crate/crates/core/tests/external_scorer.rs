mod common;

use axum::http::{HeaderMap, StatusCode};
use axum::routing::post;
use axum::{Json, Router};
use common::spawn;
use gec_eval::lm::{ExternalScorer, LanguageModel, ScoreRequest, ScoreResponse, WireScore};
use gec_eval::metrics::{scribendi_corpus, scribendi_scores, ScribendiConfig, ScribendiItem};
use gec_eval::corpus::Cefr;
use std::time::Duration;

/// Scores each text by its length: longer texts are less likely, and the
/// text "bättre" is strongly preferred.
fn echo_scores(req: &ScoreRequest) -> ScoreResponse {
    ScoreResponse {
        scores: req
            .texts
            .iter()
            .map(|t| WireScore {
                log_prob: if t.contains("bättre") { -1.0 } else { -(t.chars().count() as f64) },
                token_count: t.chars().count() as u64 + 1,
            })
            .collect(),
    }
}

fn echo_server() -> String {
    let app = Router::new().route(
        "/score",
        post(|headers: HeaderMap, Json(req): Json<ScoreRequest>| async move {
            let mut out = HeaderMap::new();
            if let Some(id) = headers.get("x-request-id") {
                out.insert("x-request-id", id.clone());
            }
            (out, Json(echo_scores(&req)))
        }),
    );
    spawn(app)
}

#[test]
fn batch_order_is_preserved() {
    let scorer = ExternalScorer::new(&echo_server(), Duration::from_secs(10));
    let texts = ["a", "abc", "ab", "bättre text"];
    let got = scorer.score_batch(&texts).unwrap();
    let lp: Vec<f64> = got.iter().map(|s| s.log_prob).collect();
    assert_eq!(lp, vec![-1.0, -3.0, -2.0, -1.0]);
    assert_eq!(got[1].token_count, 4);
    assert!(scorer.score_batch(&[]).unwrap().is_empty());
}

#[test]
fn scribendi_through_service() {
    let scorer = ExternalScorer::new(&format!("{}/score", echo_server()), Duration::from_secs(10));
    let item = |id: &str, src: &str, hyp: &str| ScribendiItem {
        id: id.into(),
        cefr: Cefr::A,
        source: src.into(),
        hypothesis: hyp.into(),
    };
    let items = vec![
        item("1", "vi har en bra text här idag", "vi har en bättre text här idag"),
        item("2", "en bra text", "en bra text"),
        item("3", "en bra text här", "en bra texten här"),
    ];
    let cfg = ScribendiConfig::default();
    assert_eq!(scribendi_scores(&items, &scorer, &cfg).unwrap(), vec![1, 0, -1]);
    assert_eq!(scribendi_corpus(&items, &scorer, &cfg).unwrap(), 0.0);
}

#[test]
fn mismatched_request_id_is_rejected() {
    let app = Router::new().route(
        "/score",
        post(|Json(req): Json<ScoreRequest>| async move {
            let mut out = HeaderMap::new();
            out.insert("x-request-id", "bogus".parse().unwrap());
            (out, Json(echo_scores(&req)))
        }),
    );
    let scorer = ExternalScorer::new(&spawn(app), Duration::from_secs(10));
    let err = scorer.score_batch(&["a", "b"]).unwrap_err();
    assert!(err.to_string().contains("malformed"), "{err}");
}

#[test]
fn short_response_and_http_errors() {
    let app = Router::new()
        .route(
            "/short/score",
            post(|Json(_): Json<ScoreRequest>| async move {
                Json(ScoreResponse {
                    scores: vec![WireScore {
                        log_prob: -1.0,
                        token_count: 1,
                    }],
                })
            }),
        )
        .route("/fail/score", post(|| async { StatusCode::INTERNAL_SERVER_ERROR }));
    let base = spawn(app);
    let short = ExternalScorer::new(&format!("{base}/short"), Duration::from_secs(10));
    let err = short.score_batch(&["a", "b", "c"]).unwrap_err();
    assert!(err.to_string().contains("expected 3 scores, got 1"), "{err}");
    let fail = ExternalScorer::new(&format!("{base}/fail"), Duration::from_secs(10));
    let err = fail.score("a").unwrap_err();
    assert!(err.to_string().contains("500"), "{err}");
    let down = ExternalScorer::new("http://127.0.0.1:9", Duration::from_secs(2));
    assert!(down.score("a").unwrap_err().to_string().contains("transport"));
}
