import { defineConfig } from "vitest/config";

// Training-heavy tests run several full model fits; give them generous
// timeouts and keep files serial so the single-threaded CPU backend is not
// oversubscribed.
export default defineConfig({
  test: {
    environment: "node",
    testTimeout: 600_000,
    hookTimeout: 600_000,
    fileParallelism: false,
    include: ["tests/**/*.test.ts"],
  },
});
