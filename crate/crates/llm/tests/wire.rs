use grove_llm::{ChatClient, HttpChatClient, LlmError, Message};
use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::mpsc;
use std::time::{Duration, Instant};

struct Request {
    head: String,
    body: String,
}

fn read_request(stream: &mut TcpStream) -> Request {
    let mut buf = Vec::new();
    let mut chunk = [0u8; 4096];
    let split = loop {
        let n = stream.read(&mut chunk).expect("read request");
        assert!(n > 0, "eof before end of headers");
        buf.extend_from_slice(&chunk[..n]);
        if let Some(i) = buf.windows(4).position(|w| w == b"\r\n\r\n") {
            break i;
        }
    };
    let head = String::from_utf8_lossy(&buf[..split]).to_string();
    let content_length: usize = head
        .lines()
        .find_map(|l| {
            let (name, value) = l.split_once(':')?;
            name.eq_ignore_ascii_case("content-length")
                .then(|| value.trim().parse().unwrap())
        })
        .unwrap_or(0);
    let mut body = buf[split + 4..].to_vec();
    while body.len() < content_length {
        let n = stream.read(&mut chunk).expect("read body");
        assert!(n > 0, "eof before end of body");
        body.extend_from_slice(&chunk[..n]);
    }
    Request {
        head,
        body: String::from_utf8_lossy(&body).to_string(),
    }
}

fn ok_response(body: &str) -> String {
    format!(
        "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
        body.len(),
        body
    )
}

const SERVER_ERROR: &str =
    "HTTP/1.1 500 Internal Server Error\r\nContent-Length: 0\r\nConnection: close\r\n\r\n";

/// Serves the scripted responses, one connection each, and hands back every
/// request it saw.
fn serve(responses: Vec<String>) -> (String, mpsc::Receiver<Request>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let endpoint = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        for response in responses {
            let (mut stream, _) = listener.accept().unwrap();
            let request = read_request(&mut stream);
            tx.send(request).unwrap();
            stream.write_all(response.as_bytes()).unwrap();
        }
    });
    (endpoint, rx)
}

#[test]
fn request_and_response_follow_the_chat_wire_format() {
    let reply = "Sure.\n```reward\nreturn 1.0\n```";
    let body = serde_json::json!({"choices": [{"message": {"content": reply}}]});
    let (endpoint, rx) = serve(vec![ok_response(&body.to_string())]);

    let client = HttpChatClient::with_key(&endpoint, "grove-test", "sk-test");
    let messages = vec![Message::user("write a reward")];
    let text = client.complete(&messages).unwrap();
    assert_eq!(text, reply);

    let seen = rx.recv().unwrap();
    let head_lower = seen.head.to_ascii_lowercase();
    assert!(seen.head.starts_with("POST /v1/chat/completions"));
    assert!(head_lower.contains("authorization: bearer sk-test"));
    assert!(head_lower.contains("content-type: application/json"));

    let sent: serde_json::Value = serde_json::from_str(&seen.body).unwrap();
    assert_eq!(sent["model"], "grove-test");
    assert_eq!(sent["temperature"], 0.2);
    assert_eq!(sent["messages"][0]["role"], "user");
    assert_eq!(sent["messages"][0]["content"], "write a reward");
}

#[test]
fn server_errors_are_retried_until_one_succeeds() {
    let body = serde_json::json!({"choices": [{"message": {"content": "ok"}}]});
    let (endpoint, rx) = serve(vec![
        SERVER_ERROR.to_string(),
        ok_response(&body.to_string()),
    ]);

    let client = HttpChatClient::with_key(&endpoint, "m", "k")
        .backoff_base(Duration::from_millis(1));
    let text = client.complete(&[Message::user("hi")]).unwrap();
    assert_eq!(text, "ok");
    assert_eq!(rx.iter().count(), 2);
}

#[test]
fn persistent_failure_stops_after_three_attempts_with_backoff() {
    let (endpoint, rx) = serve(vec![
        SERVER_ERROR.to_string(),
        SERVER_ERROR.to_string(),
        SERVER_ERROR.to_string(),
    ]);

    let base = Duration::from_millis(20);
    let client = HttpChatClient::with_key(&endpoint, "m", "k").backoff_base(base);
    let start = Instant::now();
    let err = client.complete(&[Message::user("hi")]).unwrap_err();
    let elapsed = start.elapsed();

    match err {
        LlmError::Transport { attempts, last } => {
            assert_eq!(attempts, 3);
            assert!(last.contains("500"), "last error was: {last}");
        }
        other => panic!("expected transport error, got {other}"),
    }
    // backoff slept base then 2*base between the three attempts
    assert!(elapsed >= base * 3, "no backoff observed: {elapsed:?}");
    assert_eq!(rx.iter().count(), 3);
}

#[test]
fn malformed_success_body_is_fatal_not_retried() {
    let (endpoint, rx) = serve(vec![ok_response("{\"unexpected\": true}")]);
    let client = HttpChatClient::with_key(&endpoint, "m", "k")
        .backoff_base(Duration::from_millis(1));
    let err = client.complete(&[Message::user("hi")]).unwrap_err();
    assert!(matches!(err, LlmError::BadResponse(_)), "got {err}");
    assert_eq!(rx.iter().count(), 1);
}

#[test]
fn empty_choices_is_a_bad_response() {
    let (endpoint, _rx) = serve(vec![ok_response("{\"choices\": []}")]);
    let client = HttpChatClient::with_key(&endpoint, "m", "k");
    let err = client.complete(&[Message::user("hi")]).unwrap_err();
    match err {
        LlmError::BadResponse(msg) => assert!(msg.contains("choices")),
        other => panic!("expected bad response, got {other}"),
    }
}

#[test]
fn api_key_comes_from_the_environment() {
    std::env::remove_var(grove_llm::KEY_ENV_VAR);
    assert!(matches!(
        HttpChatClient::new("http://localhost:1/x", "m"),
        Err(LlmError::MissingKey)
    ));
    std::env::set_var(grove_llm::KEY_ENV_VAR, "from-env");
    assert!(HttpChatClient::new("http://localhost:1/x", "m").is_ok());
    std::env::remove_var(grove_llm::KEY_ENV_VAR);
}
