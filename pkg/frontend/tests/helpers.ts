import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const here = dirname(fileURLToPath(import.meta.url));

export interface Fixture {
  request: { method: string; path: string; body: unknown };
  status: number;
  response: unknown;
}

export function loadFixture(name: string): Fixture {
  const raw = readFileSync(join(here, "..", "fixtures", `${name}.json`), "utf-8");
  return JSON.parse(raw) as Fixture;
}

/** Fetch stub replaying recorded fixtures; matches on method, path and
 * (for generate) the requested latent point. */
export function fixtureFetch(names: string[]): FetchLike {
  const fixtures = names.map(loadFixture);
  return async (url: string, init?: RequestInit) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    for (const f of fixtures) {
      if (f.request.path !== url || f.request.method !== method) continue;
      if (method === "POST" && f.request.body !== null) {
        if (JSON.stringify(f.request.body) !== JSON.stringify(body)) continue;
      }
      return new Response(JSON.stringify(f.response), {
        status: f.status,
        headers: { "content-type": "application/json" },
      });
    }
    throw new Error(`no fixture for ${method} ${url} ${JSON.stringify(body)}`);
  };
}

/** Instantiate the real index.html markup (scripts stripped) into jsdom. */
export function mountAppDom(): void {
  const html = readFileSync(join(here, "..", "static", "index.html"), "utf-8");
  const bodyMatch = html.match(/<body>([\s\S]*)<\/body>/);
  if (!bodyMatch) throw new Error("index.html has no body");
  document.body.innerHTML = bodyMatch[1].replace(/<script[\s\S]*?<\/script>/g, "");
}

export function texts(selector: string): string[] {
  return Array.from(document.querySelectorAll(selector)).map(
    (n) => n.textContent ?? "",
  );
}
