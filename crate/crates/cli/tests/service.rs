use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::PathBuf;
use std::process::{Child, Command, Output, Stdio};
use std::thread;

use serde_json::{json, Value};

/// A running `contact serve` on an ephemeral port, killed on drop.
struct Service {
    child: Child,
    addr: String,
}

impl Service {
    fn start() -> Service {
        let mut child = Command::new(env!("CARGO_BIN_EXE_contact"))
            .args(["serve", "--port", "0"])
            .stderr(Stdio::piped())
            .spawn()
            .expect("service starts");
        let mut line = String::new();
        BufReader::new(child.stderr.take().unwrap())
            .read_line(&mut line)
            .unwrap();
        let addr = line
            .trim()
            .strip_prefix("listening on http://")
            .unwrap_or_else(|| panic!("unexpected banner {line:?}"))
            .to_string();
        Service { child, addr }
    }

    fn request(&self, method: &str, path: &str, body: &str) -> (u16, String, String) {
        let mut s = TcpStream::connect(&self.addr).expect("connect");
        write!(
            s,
            "{method} {path} HTTP/1.1\r\nHost: {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            self.addr,
            body.len()
        )
        .unwrap();
        let mut raw = String::new();
        s.read_to_string(&mut raw).unwrap();
        let (head, payload) = raw.split_once("\r\n\r\n").expect("complete response");
        let status = head.split(' ').nth(1).unwrap().parse().unwrap();
        (status, head.to_ascii_lowercase(), payload.to_string())
    }

    fn post(&self, path: &str, body: &Value) -> (u16, String) {
        let (status, _, payload) = self.request("POST", path, &body.to_string());
        (status, payload)
    }
}

impl Drop for Service {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contact"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn surface(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("surfaces").join(name)
}

fn surface_json(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(surface(name)).unwrap()).unwrap()
}

#[test]
fn health() {
    let s = Service::start();
    let (status, head, body) = s.request("GET", "/api/health", "");
    assert_eq!((status, body.as_str()), (200, "ok"));
    assert!(head.contains("access-control-allow-origin: *"));
}

#[test]
fn front_endpoints() {
    let s = Service::start();
    let (status, body) = s.post("/api/front/invariants", &json!({"word": "L1 R1"}));
    assert_eq!(status, 200);
    assert!(body.starts_with(r#"{"tb":-1,"r":0,"#), "{body}");

    let (status, body) = s.post("/api/front/parse", &json!({"word": "L1 R1"}));
    assert_eq!(status, 200);
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["profile"], json!([0, 2, 0]));
    assert!(!v["moves"].as_array().unwrap().is_empty());

    let mismatch = json!({"word": "L1 R1", "move": {"kind": "III", "at": 1}});
    let (status, body) = s.post("/api/front/move", &mismatch);
    assert_eq!(status, 422);
    let e: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(e["rule"], "pattern_mismatch");
    assert!(e["error"].is_string());

    let kink = json!({"word": "L1 R1", "move": {"kind": "I", "slot": 1, "strand": 1}});
    let (status, body) = s.post("/api/front/move", &kink);
    assert_eq!(status, 200);
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["invariants"]["tb"], -1);

    let stab = json!({"word": "L1 R1", "sign": "+", "site": {"slot": 1, "strand": 1}});
    let (status, body) = s.post("/api/front/stabilize", &stab);
    assert_eq!(status, 200);
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(
        (v["invariants"]["tb"].as_i64(), v["invariants"]["r"].as_i64()),
        (Some(-2), Some(1))
    );

    let (status, body) = s.post("/api/front/geometry", &json!({"word": "L1 R1"}));
    assert_eq!(status, 200);
    let v: Value = serde_json::from_str(&body).unwrap();
    assert!(v["svg"].as_str().unwrap().starts_with("<svg"));
    assert!(!v["paths"].as_array().unwrap().is_empty());
    assert!(v["samples"].as_array().unwrap().len() > 4);
}

#[test]
fn schema_violations_are_422() {
    let s = Service::start();
    for body in [
        json!({"word": "L1 R1", "unknown": true}),
        json!({"word": 5}),
        json!({"form": "dz + x*dy", "grid": 4}),
        json!({"word": "L1 R2"}),
    ] {
        let route = if body.get("form").is_some() {
            "/api/contact/check"
        } else {
            "/api/front/invariants"
        };
        let (status, payload) = s.post(route, &body);
        assert_eq!(status, 422, "{body} -> {payload}");
        let e: Value = serde_json::from_str(&payload).unwrap();
        assert!(e["error"].is_string() && e["rule"].is_string());
    }
    let (status, _, _) = s.request("POST", "/api/front/invariants", "{not json");
    assert_eq!(status, 422);
    let (status, _, _) = s.request("POST", "/api/nowhere", "{}");
    assert_eq!(status, 404);
}

/// The body of a successful CLI run must match the service byte for byte.
#[test]
fn cli_and_service_agree_byte_for_byte() {
    let s = Service::start();
    let sphere = surface("sphere.json").display().to_string();
    let torus = surface("torus-sine.json").display().to_string();
    let cases: Vec<(Vec<&str>, &str, Value)> = vec![
        (
            vec!["check-contact", "--form", "dz + x*dy", "--box", "-1,1"],
            "/api/contact/check",
            json!({"form": "dz + x*dy", "box": [-1.0, 1.0]}),
        ),
        (
            vec!["front-invariants", "L1 R1"],
            "/api/front/invariants",
            json!({"word": "L1 R1"}),
        ),
        (
            vec!["bennequin", "L1 L3 X2 X2 X2 R3 R1"],
            "/api/front/bennequin",
            json!({"word": "L1 L3 X2 X2 X2 R3 R1"}),
        ),
        (
            vec!["stabilize", "L1 R1", "--sign", "-", "--slot", "1", "--strand", "1"],
            "/api/front/stabilize",
            json!({"word": "L1 R1", "sign": "-", "site": {"slot": 1, "strand": 1}}),
        ),
        (
            vec!["render", "L1 R1", "--format", "json"],
            "/api/front/geometry",
            json!({"word": "L1 R1"}),
        ),
        (
            vec!["foliate", "--form", "dz + x*dy - y*dx", "--surface", &sphere],
            "/api/foliation/run",
            json!({"form": "dz + x*dy - y*dx", "surface": surface_json("sphere.json")}),
        ),
        (
            vec![
                "dividing-set",
                "--form",
                "dz + x*dy",
                "--surface",
                &torus,
                "--period",
                "1,1",
            ],
            "/api/foliation/dividing-set",
            json!({"form": "dz + x*dy", "surface": surface_json("torus-sine.json"), "period": [1.0, 1.0]}),
        ),
    ];
    for (args, route, body) in cases {
        let out = cli(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let (status, payload) = s.post(route, &body);
        assert_eq!(status, 200, "{route}: {payload}");
        assert_eq!(String::from_utf8(out.stdout).unwrap(), payload, "{args:?}");
    }

    let out = cli(&["front-move", "L1 R1", "--kind", "III", "--at", "1"]);
    let (status, payload) = s.post(
        "/api/front/move",
        &json!({"word": "L1 R1", "move": {"kind": "III", "at": 1}}),
    );
    assert_eq!((out.status.code(), status), (Some(2), 422));
    assert_eq!(String::from_utf8(out.stderr).unwrap(), payload);
}

#[test]
fn concurrent_requests_get_identical_answers() {
    let s = Service::start();
    let body = json!({"form": "cos(sqrt(x^2+y^2))*dz + sinc(sqrt(x^2+y^2))*(x*dy - y*dx)", "box": [-3.0, 3.0]});
    let answers: Vec<(u16, String)> = thread::scope(|scope| {
        let handles: Vec<_> = (0..8)
            .map(|_| scope.spawn(|| s.post("/api/contact/check", &body)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert!(answers.iter().all(|a| a.0 == 200 && a.1 == answers[0].1));
    let v: Value = serde_json::from_str(&answers[0].1).unwrap();
    assert_eq!(v["contact"], true);
}

#[test]
fn approximation_endpoint() {
    let s = Service::start();
    let n = 96;
    let points: Vec<[f64; 3]> = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            [0.0, t.cos(), t.sin()]
        })
        .collect();
    let (status, body) = s.post("/api/front/approximate", &json!({"points": points, "epsilon": 0.25}));
    assert_eq!(status, 200, "{body}");
    let v: Value = serde_json::from_str(&body).unwrap();
    assert!(v["hausdorff"].as_f64().unwrap() < 0.25);
    let (status, _) = s.post(
        "/api/front/approximate",
        &json!({"points": [[0, 0, 0]], "epsilon": 0.1}),
    );
    assert_eq!(status, 422);
}

#[test]
fn busy_port_is_reported() {
    let s = Service::start();
    let port = s.addr.rsplit(':').next().unwrap();
    let out = cli(&["serve", "--port", port]);
    assert_eq!(out.status.code(), Some(2));
    let e: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(e["rule"], "port");
}
