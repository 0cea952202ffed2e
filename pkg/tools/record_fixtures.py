"""Record service responses from the reference checkpoint into the frontend
contract fixtures.

The UI tests replay these byte-for-byte through a stubbed fetch, so every
number the UI renders is traceable to a real API response.
"""

import argparse
import json
from pathlib import Path

from fastapi.testclient import TestClient

from alloyvae.service import create_app

REQUESTS = [
    ("classify", "POST", "/api/classify", {"formula": "Fe20Ni20Co20Ti20Cu20"}),
    ("encode", "POST", "/api/encode", {"formula": "Fe14Ni16Cr22Co14Al22Cu8"}),
    ("generate", "POST", "/api/generate", {"z": [0.0, -0.8], "target_p": 0.9}),
    ("generate_low", "POST", "/api/generate", {"z": [0.8, -0.5], "target_p": 0.1}),
    ("invert", "POST", "/api/invert", {"formula": "Fe14Ni16Cr22Co14Al22Cu8"}),
    ("shap", "POST", "/api/shap", {"formula": "Fe20Ni20Co20Ti20Cu20"}),
    ("model", "GET", "/api/model", None),
    ("latent_map", "GET", "/api/latent-map", None),
    ("error_bad_formula", "POST", "/api/shap", {"formula": "20++"}),
]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--checkpoint", required=True)
    parser.add_argument("--out", default=str(Path(__file__).parent.parent
                                             / "frontend" / "fixtures"))
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    app = create_app(checkpoint_path=args.checkpoint)
    with TestClient(app, raise_server_exceptions=False) as client:
        for name, method, path, body in REQUESTS:
            if method == "GET":
                resp = client.get(path)
            else:
                resp = client.post(path, json=body)
            fixture = {
                "request": {"method": method, "path": path, "body": body},
                "status": resp.status_code,
                "response": resp.json(),
            }
            target = out / f"{name}.json"
            target.write_text(json.dumps(fixture, indent=1) + "\n", encoding="utf-8")
            print(f"wrote {target} (status {resp.status_code})")


if __name__ == "__main__":
    main()
