import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // DOM test files opt in via `@vitest-environment happy-dom`. The window
    // origin matches the port the scripted loop test starts the service on,
    // so the client's relative fetches are plain same-origin requests.
    environmentOptions: {
      happyDOM: { url: "http://127.0.0.1:8474/" },
    },
    testTimeout: 60_000,
    hookTimeout: 90_000,
    fileParallelism: false,
  },
});
