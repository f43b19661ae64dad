"""Minimal chat-completions transport.

Requests carry only the model and a single user message; no sampling
parameters are sent, so the provider's defaults apply. The API key is read
from the environment (LlmConfig.api_key_env) and must be present before a run
starts."""

from __future__ import annotations

import os
import time

import requests

from .prompts import PromptBundle
from .records import LlmConfig


class CredentialsError(RuntimeError):
    pass


class TransportError(RuntimeError):
    pass


def ensure_credentials(cfg: LlmConfig) -> str:
    key = os.environ.get(cfg.api_key_env, "")
    if not key:
        raise CredentialsError(
            f"missing LLM credentials: set the {cfg.api_key_env} environment variable"
        )
    return key


def llm_complete(bundle: PromptBundle, cfg: LlmConfig) -> str:
    """Send the bundle as one user message; return the assistant text.

    Retries failed requests with exponential backoff, max_retries times after
    the first attempt."""
    key = ensure_credentials(cfg)
    payload = {
        "model": cfg.model,
        "messages": [{"role": "user", "content": bundle.text()}],
    }
    headers = {"Authorization": f"Bearer {key}"}
    last_error: Exception | None = None
    for attempt in range(cfg.max_retries + 1):
        if attempt > 0 and cfg.backoff_s > 0:
            time.sleep(cfg.backoff_s * 2 ** (attempt - 1))
        try:
            resp = requests.post(cfg.endpoint, json=payload, headers=headers, timeout=cfg.timeout_s)
            resp.raise_for_status()
            data = resp.json()
            return data["choices"][0]["message"]["content"]
        except Exception as e:  # noqa: BLE001 - any transport problem is retryable
            last_error = e
    raise TransportError(f"LLM request failed after {cfg.max_retries + 1} attempts: {last_error}")
