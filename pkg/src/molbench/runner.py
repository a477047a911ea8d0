"""Task execution against model providers, with deterministic replay.

A provider is anything with a ``complete(task) -> ModelResponse`` method.
The replay provider serves recorded responses from a fixtures file, giving
fully offline, byte-deterministic runs. Live adapters for the two supported
wire formats are thin request/response mappings with lazy imports so the
offline path has no network dependencies.

Runs are crash-resumable: responses are appended to the output file as they
arrive, already-answered task ids are skipped on restart, and the finished
file is rewritten sorted by task_id so completion order never leaks into
downstream artifacts.
"""

from __future__ import annotations

import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .moljson import MOLJSON_SCHEMA, emit_schema
from .taskgen import Task


class ProviderError(RuntimeError):
    pass


class MissingFixture(ProviderError):
    pass


@dataclass
class ProviderConfig:
    kind: str = "replay"  # replay | openai | anthropic
    model: str = ""
    fixtures_path: str | None = None
    max_output_tokens: int = 16384
    reasoning_effort: str = "low"
    thinking_budget: int = 4096
    parallelism: int = 4
    max_attempts: int = 3
    backoff_s: float = 1.0
    base_url: str | None = None

    def __post_init__(self) -> None:
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if self.kind == "replay" and not self.fixtures_path:
            raise ValueError("replay provider requires fixtures_path")


@dataclass
class ModelResponse:
    task_id: str
    raw_text: str
    output_tokens: int = 0
    latency_ms: float = 0.0
    attempts: int = 1
    error: str | None = None
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        doc = {
            "task_id": self.task_id,
            "raw_text": self.raw_text,
            "output_tokens": self.output_tokens,
            "latency_ms": self.latency_ms,
            "attempts": self.attempts,
        }
        if self.error:
            doc["error"] = self.error
        return doc


def load_responses(path: str) -> list[ModelResponse]:
    out = []
    if not os.path.exists(path):
        return out
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            doc = json.loads(line)
            out.append(
                ModelResponse(
                    task_id=doc["task_id"],
                    raw_text=doc["raw_text"],
                    output_tokens=doc.get("output_tokens", 0),
                    latency_ms=doc.get("latency_ms", 0.0),
                    attempts=doc.get("attempts", 1),
                    error=doc.get("error"),
                )
            )
    return out


def record_fixture(responses: list[ModelResponse], path: str) -> None:
    """Persist responses as a replayable fixtures file."""
    with open(path, "w", encoding="utf-8") as fh:
        for resp in sorted(responses, key=lambda r: r.task_id):
            fh.write(json.dumps(resp.to_json(), sort_keys=True) + "\n")


class ReplayProvider:
    """Serves recorded responses; unknown task ids raise MissingFixture."""

    retryable = False

    def __init__(self, fixtures_path: str):
        self._fixtures = {r.task_id: r for r in load_responses(fixtures_path)}

    def complete(self, task: Task) -> ModelResponse:
        try:
            recorded = self._fixtures[task.task_id]
        except KeyError:
            raise MissingFixture(f"no fixture for task {task.task_id}") from None
        return ModelResponse(
            task_id=task.task_id,
            raw_text=recorded.raw_text,
            output_tokens=recorded.output_tokens,
            latency_ms=recorded.latency_ms,
        )


def _schema_for_provider(schema: dict, kind: str) -> dict:
    """Anthropic structured output rejects numeric min/max; swap the standard
    document schema for its enum-ranges variant there."""
    if kind == "anthropic" and schema == MOLJSON_SCHEMA:
        return emit_schema("enum-ranges")
    return schema


class OpenAIProvider:
    retryable = True

    def __init__(self, config: ProviderConfig):
        self.config = config

    def complete(self, task: Task) -> ModelResponse:
        import httpx

        url = (self.config.base_url or "https://api.openai.com/v1") + "/responses"
        headers = {"Authorization": f"Bearer {os.environ['OPENAI_API_KEY']}"}
        body = {
            "model": self.config.model,
            "input": [{"role": "user", "content": task.prompt}],
            "reasoning": {"effort": self.config.reasoning_effort},
            "max_output_tokens": self.config.max_output_tokens,
            "text": {
                "format": {
                    "type": "json_schema",
                    "name": "response",
                    "strict": True,
                    "schema": _schema_for_provider(task.output_schema, "openai"),
                }
            },
        }
        started = time.monotonic()
        reply = httpx.post(url, json=body, headers=headers, timeout=300.0)
        if reply.status_code != 200:
            raise ProviderError(f"openai: HTTP {reply.status_code}: {reply.text[:500]}")
        doc = reply.json()
        text = "".join(
            part.get("text", "")
            for item in doc.get("output", [])
            if item.get("type") == "message"
            for part in item.get("content", [])
        )
        return ModelResponse(
            task_id=task.task_id,
            raw_text=text,
            output_tokens=doc.get("usage", {}).get("output_tokens", 0),
            latency_ms=(time.monotonic() - started) * 1000,
        )


class AnthropicProvider:
    retryable = True

    def __init__(self, config: ProviderConfig):
        self.config = config

    def complete(self, task: Task) -> ModelResponse:
        import httpx

        url = (self.config.base_url or "https://api.anthropic.com") + "/v1/messages"
        headers = {
            "x-api-key": os.environ["ANTHROPIC_API_KEY"],
            "anthropic-version": "2023-06-01",
        }
        body = {
            "model": self.config.model,
            "max_tokens": self.config.max_output_tokens,
            "thinking": {"type": "enabled", "budget_tokens": self.config.thinking_budget},
            "messages": [{"role": "user", "content": task.prompt}],
            "output_format": {
                "type": "json_schema",
                "schema": _schema_for_provider(task.output_schema, "anthropic"),
            },
        }
        started = time.monotonic()
        reply = httpx.post(url, json=body, headers=headers, timeout=300.0)
        if reply.status_code != 200:
            raise ProviderError(f"anthropic: HTTP {reply.status_code}: {reply.text[:500]}")
        doc = reply.json()
        text = "".join(
            block.get("text", "") for block in doc.get("content", []) if block.get("type") == "text"
        )
        return ModelResponse(
            task_id=task.task_id,
            raw_text=text,
            output_tokens=doc.get("usage", {}).get("output_tokens", 0),
            latency_ms=(time.monotonic() - started) * 1000,
        )


def make_provider(config: ProviderConfig):
    if config.kind == "replay":
        return ReplayProvider(config.fixtures_path)
    if config.kind == "openai":
        return OpenAIProvider(config)
    if config.kind == "anthropic":
        return AnthropicProvider(config)
    raise ValueError(f"unknown provider kind {config.kind!r}")


def _attempt(provider, task: Task, config: ProviderConfig) -> ModelResponse:
    attempts = 0
    while True:
        attempts += 1
        try:
            response = provider.complete(task)
            response.attempts = attempts
            return response
        except MissingFixture as exc:
            return ModelResponse(task.task_id, "", attempts=attempts, error=str(exc))
        except ProviderError as exc:
            if not provider.retryable or attempts >= config.max_attempts:
                # Exhausted: record an empty response, which grades as "empty".
                return ModelResponse(task.task_id, "", attempts=attempts, error=str(exc))
            time.sleep(config.backoff_s * attempts)


def run_tasks(tasks: list[Task], config: ProviderConfig, out_path: str) -> list[ModelResponse]:
    """Answer every task exactly once, persisting incrementally.

    Restarting against an existing output file skips already-answered task
    ids; the completed file is sorted by task_id.
    """
    provider = make_provider(config)
    existing = {r.task_id: r for r in load_responses(out_path)}
    pending = [t for t in tasks if t.task_id not in existing]

    lock = threading.Lock()
    with open(out_path, "a", encoding="utf-8") as fh:

        def work(task: Task) -> ModelResponse:
            response = _attempt(provider, task, config)
            with lock:
                fh.write(json.dumps(response.to_json(), sort_keys=True) + "\n")
                fh.flush()
            return response

        if pending:
            with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
                for response in pool.map(work, pending):
                    existing[response.task_id] = response

    wanted = {t.task_id for t in tasks}
    final = sorted(
        (r for r in existing.values() if r.task_id in wanted), key=lambda r: r.task_id
    )
    with open(out_path, "w", encoding="utf-8") as fh:
        for response in final:
            fh.write(json.dumps(response.to_json(), sort_keys=True) + "\n")
    return final
