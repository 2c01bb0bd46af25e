"""Record a real-server interaction fixture for the frontend tests.

Drives the palette server in-process through the exact request sequence the
studio UI produces (upload, generate, legend toggles, brush drags, save and
restore, a 202-poll generation, and one malformed upload) and stores every
request/response pair. The frontend test suite replays these entries
verbatim, so its color assertions are byte-equal checks against genuine
server output.

Pixel-to-data math mirrors src/transform.ts operation for operation; both
run IEEE doubles, so the recorded rectangles match the app's requests
exactly.

Run from frontend/: python3 scripts/record_fixture.py
"""

import json
import os
import time

from fastapi.testclient import TestClient

from contrast_duo.server import create_app

OUT = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures", "session.json")

PLOT_W = 600.0
PLOT_H = 600.0
MARK_DIAMETER = 10.0
PAD = MARK_DIAMETER / 2 + 2

DATASET = {
    "points": [
        {"x": 50.0, "y": 50.0, "label": 0},
        {"x": 50.5, "y": 50.4, "label": 1},
        {"x": 10.0, "y": 10.0, "label": 0},
        {"x": 20.0, "y": 80.0, "label": 1},
        {"x": 80.0, "y": 20.0, "label": 2},
        {"x": 85.0, "y": 85.0, "label": 2},
        {"x": 15.0, "y": 45.0, "label": 0},
        {"x": 60.0, "y": 70.0, "label": 1},
        {"x": 90.0, "y": 55.0, "label": 2},
    ],
    "classNames": ["alpha", "beta", "gamma"],
}

X_LO, X_SPAN = 10.0, 80.0
Y_LO, Y_SPAN = 10.0, 75.0


def to_data(px: float, py: float):
    # same expressions as PlotTransform.toData
    x = X_LO + ((px - PAD) * X_SPAN) / (PLOT_W - 2 * PAD)
    y = Y_LO + ((PLOT_H - PAD - py) * Y_SPAN) / (PLOT_H - 2 * PAD)
    return x, y


def to_px(x: float, y: float):
    px = PAD + ((x - X_LO) / X_SPAN) * (PLOT_W - 2 * PAD)
    py = PLOT_H - PAD - ((y - Y_LO) / Y_SPAN) * (PLOT_H - 2 * PAD)
    return px, py


def rect_to_data(x0: float, y0: float, x1: float, y1: float):
    ax, ay = to_data(x0, y0)
    bx, by = to_data(x1, y1)
    return {
        "xMin": min(ax, bx),
        "yMin": min(ay, by),
        "xMax": max(ax, bx),
        "yMax": max(ay, by),
    }


BRUSH_MID_PX = [150.0, 110.0, 330.0, 420.0]
BRUSH_FINAL_PX = [150.0, 110.0, 430.0, 300.0]
EMPTY_CLICK_PX = [580.0, 560.0]
POINT_CLICK_INDEX = 4

entries = []


def record(client, tag, method, path, *, json_body=None, text_body=None, expect=None):
    if text_body is not None:
        resp = client.request(method, path, content=text_body.encode())
        request = text_body
    elif json_body is not None:
        resp = client.request(method, path, content=json.dumps(json_body).encode())
        request = json_body
    else:
        resp = client.request(method, path)
        request = None
    entries.append(
        {
            "tag": tag,
            "method": method,
            "path": path,
            "request": request,
            "status": resp.status_code,
            "response": resp.json(),
        }
    )
    if expect is not None:
        assert resp.status_code == expect, (tag, resp.status_code, resp.text)
    return resp.json()


def main():
    dataset_text = json.dumps(DATASET)
    client = TestClient(create_app())

    summary = record(client, "upload", "POST", "/sessions", text_body=dataset_text, expect=201)
    sid = summary["id"]
    base = f"/sessions/{sid}"

    config_a = {"seed": 3, "background": "#ffffff", "sigma": 0.05, "markSize": 10}
    record(client, "gen-a", "POST", f"{base}/palette", json_body=config_a, expect=200)
    record(client, "hl-none-a", "POST", f"{base}/highlight", json_body={"mode": "none"}, expect=200)

    record(client, "hl-c0", "POST", f"{base}/highlight",
           json_body={"mode": "classes", "classes": [0]}, expect=200)
    record(client, "hl-c02", "POST", f"{base}/highlight",
           json_body={"mode": "classes", "classes": [0, 2]}, expect=200)
    record(client, "hl-c2", "POST", f"{base}/highlight",
           json_body={"mode": "classes", "classes": [2]}, expect=200)

    mid = record(client, "hl-brush-mid", "POST", f"{base}/highlight",
                 json_body={"brush": rect_to_data(*BRUSH_MID_PX)}, expect=200)
    assert mid["selection"] == {"mode": "points", "points": [0, 1]}, mid["selection"]
    final = record(client, "hl-brush-final", "POST", f"{base}/highlight",
                   json_body={"brush": rect_to_data(*BRUSH_FINAL_PX)}, expect=200)
    assert final["selection"] == {"mode": "points", "points": [0, 1, 7]}, final["selection"]

    record(client, "hl-c1-brushed", "POST", f"{base}/highlight",
           json_body={"mode": "classes", "classes": [1], "points": [0, 1, 7]}, expect=200)

    covers_all = record(client, "hl-brush-all", "POST", f"{base}/highlight",
                        json_body={"brush": rect_to_data(0.0, 0.0, PLOT_W, PLOT_H)}, expect=200)
    assert covers_all["selection"] == {"mode": "points", "points": list(range(9))}
    assert all(covers_all["emphasized"]), covers_all["emphasized"]

    x, y = EMPTY_CLICK_PX
    cleared = record(client, "hl-clear", "POST", f"{base}/highlight",
                     json_body={"brush": rect_to_data(x, y, x, y)}, expect=200)
    assert cleared["selection"] == {"mode": "none"}, cleared["selection"]

    record(client, "hl-p4", "POST", f"{base}/highlight",
           json_body={"mode": "points", "points": [POINT_CLICK_INDEX]}, expect=200)

    record(client, "save-draft", "POST", f"{base}/saved", json_body={"name": "draft"}, expect=201)
    record(client, "saved-list", "GET", f"{base}/saved", expect=200)

    config_b = {"seed": 9, "background": "#1a3a6b", "sigma": 0.08, "markSize": 14}
    record(client, "gen-b", "POST", f"{base}/palette", json_body=config_b, expect=200)
    record(client, "hl-p4-b", "POST", f"{base}/highlight",
           json_body={"mode": "points", "points": [POINT_CLICK_INDEX]}, expect=200)

    record(client, "restore-0", "POST", f"{base}/saved/0/restore", expect=200)
    record(client, "hl-p4-restored", "POST", f"{base}/highlight",
           json_body={"mode": "points", "points": [POINT_CLICK_INDEX]}, expect=200)

    bad_csv = "x,y,label\n1.0,2.0,a\nbroken,row\n"
    record(client, "upload-bad", "POST", "/sessions", text_body=bad_csv, expect=400)

    # a second app with a zero sync budget forces the 202 + poll path
    slow = TestClient(create_app(sync_budget_seconds=0.0))
    synth_body = {"synth": {"classes": 3, "profile": "small_sparse", "seed": 2}}
    s2 = record(slow, "upload-synth", "POST", "/sessions", json_body=synth_body, expect=201)["id"]
    config_s2 = {"seed": 1, "background": "#ffffff", "sigma": 0.05, "markSize": 10}
    started = record(slow, "gen-async", "POST", f"/sessions/{s2}/palette", json_body=config_s2, expect=202)
    poll = started["poll"]
    for attempt in range(600):
        payload = record(slow, f"poll-{attempt}", "GET", poll)
        if entries[-1]["status"] != 202:
            break
        time.sleep(0.05)
    assert entries[-1]["status"] == 200, entries[-1]
    assert payload["constraints"]["allPass"] is True

    fixture = {
        "meta": {
            "datasetText": dataset_text,
            "plot": {"width": PLOT_W, "height": PLOT_H, "markDiameter": MARK_DIAMETER},
            "brushMidPx": BRUSH_MID_PX,
            "brushFinalPx": BRUSH_FINAL_PX,
            "emptyClickPx": EMPTY_CLICK_PX,
            "pointClickIndex": POINT_CLICK_INDEX,
            "pointClickPx": list(to_px(80.0, 20.0)),
            "overlapPx": list(to_px(50.25, 50.2)),
            "sessionId": sid,
            "asyncSessionId": s2,
        },
        "entries": entries,
    }
    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as fh:
        json.dump(fixture, fh, indent=1)
        fh.write("\n")
    print(f"wrote {len(entries)} entries to {os.path.normpath(OUT)}")


if __name__ == "__main__":
    main()
