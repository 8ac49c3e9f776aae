//! One-shot HTTP server standing in for a query backend.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

pub enum Reply {
    Query(String),
    Raw(&'static str),
    Stall(Duration),
}

/// Minimal one-request-per-connection HTTP server; hands each parsed body to the caller.
pub fn stub(replies: Vec<Reply>) -> (String, mpsc::Receiver<serde_json::Value>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/generate", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for reply in replies {
            let Ok((stream, _)) = listener.accept() else { return };
            let body = read_request(&stream);
            let _ = tx.send(serde_json::from_slice(&body).unwrap_or(serde_json::Value::Null));
            respond(stream, reply);
        }
    });
    (url, rx)
}

fn read_request(stream: &TcpStream) -> Vec<u8> {
    let mut reader = BufReader::new(stream);
    let mut len = 0;
    loop {
        let mut line = String::new();
        reader.read_line(&mut line).unwrap();
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                len = v.trim().parse().unwrap();
            }
        }
    }
    let mut body = vec![0; len];
    reader.read_exact(&mut body).unwrap();
    body
}

fn respond(mut stream: TcpStream, reply: Reply) {
    let body = match reply {
        Reply::Query(q) => serde_json::json!({ "query": q }).to_string(),
        Reply::Raw(s) => s.to_string(),
        Reply::Stall(d) => {
            thread::sleep(d);
            return;
        }
    };
    let _ = write!(
        stream,
        "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
        body.len(),
        body
    );
}
