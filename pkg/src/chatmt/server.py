"""HTTP JSON API over the session store, with a server-sent event stream.

POST /sessions                      {customer_language, agent_language} -> {session_id}
POST /sessions/{id}/messages        {sender, text}                      -> {turn, summary_after}
GET  /sessions/{id}                                                     -> full state
POST /sessions/{id}/turns/{n}/retry                                     -> {turn}
GET  /sessions/{id}/events[?after=N]                                    -> SSE stream
"""

from __future__ import annotations

import asyncio
import json
from dataclasses import asdict
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .errors import BadLanguagePair, InvalidField, SessionNotFound
from .service import SessionStore, state_to_dict

SSE_POLL_SECONDS = 0.1


class CreateSessionBody(BaseModel):
    customer_language: str
    agent_language: str


class PostMessageBody(BaseModel):
    sender: str
    text: str


def create_app(store: SessionStore, console_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="chatmt session service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.post("/sessions")
    def create_session(body: CreateSessionBody) -> dict:
        try:
            session_id = store.create_session(body.customer_language, body.agent_language)
        except BadLanguagePair as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"session_id": session_id}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        try:
            return state_to_dict(store.get_session(session_id))
        except SessionNotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: PostMessageBody) -> dict:
        try:
            turn = store.post_message(session_id, body.sender, body.text)
        except SessionNotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except InvalidField as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        summary = store.get_session(session_id).summary
        return {
            "turn": asdict(turn),
            "summary_after": {"text": summary.text, "covered_turns": summary.covered_turns},
        }

    @app.post("/sessions/{session_id}/turns/{turn_index}/retry")
    def retry_turn(session_id: str, turn_index: int) -> dict:
        try:
            turn = store.retry_turn(session_id, turn_index)
        except SessionNotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except InvalidField as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"turn": asdict(turn)}

    @app.get("/sessions/{session_id}/events")
    async def event_stream(session_id: str, after: int = 0) -> StreamingResponse:
        try:
            store.events(session_id)
        except SessionNotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

        async def generate():
            cursor = after
            yield ": stream open\n\n"
            while True:
                events = await asyncio.to_thread(store.events, session_id, cursor)
                for event in events:
                    payload = json.dumps(event.payload, ensure_ascii=False)
                    yield f"id: {event.sequence_number}\nevent: {event.kind}\ndata: {payload}\n\n"
                    cursor = event.sequence_number
                await asyncio.sleep(SSE_POLL_SECONDS)

        return StreamingResponse(
            generate(),
            media_type="text/event-stream",
            headers={"Cache-Control": "no-cache", "X-Accel-Buffering": "no"},
        )

    if console_dir is not None:
        app.mount("/", StaticFiles(directory=str(console_dir), html=True), name="console")

    return app
