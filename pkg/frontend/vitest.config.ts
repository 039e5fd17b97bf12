import { defineConfig } from "vitest/config";
import { BaseSequencer, type TestSpecification } from "vitest/node";

/**
 * Run files in name order so acceptance.test.ts sees the pristine
 * 64-candidate catalog before client.test.ts appends to it.
 */
class AlphabeticalSequencer extends BaseSequencer {
  override async sort(files: TestSpecification[]): Promise<TestSpecification[]> {
    return [...files].sort((a, b) => a.moduleId.localeCompare(b.moduleId));
  }
}

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // Verbose keeps the per-criterion verdict lines from acceptance.test.ts
    // visible in the run output.
    reporters: ["verbose"],
    globalSetup: ["tests/globalSetup.ts"],
    // One fixture gateway serves every file; run them one at a time so
    // catalog-append tests cannot interleave with the page-coverage test.
    fileParallelism: false,
    sequence: { concurrent: false, sequencer: AlphabeticalSequencer },
    testTimeout: 30000,
  },
});
