import { describe, expect, it } from "vitest";

import { ApiClient, ApiFailure, ServiceUnreachable } from "../src/api.js";
import { FakeService, fixtures } from "./fake-server.js";

describe("api client", () => {
  it("reads recorded endpoints through plain fetch calls", async () => {
    const fake = new FakeService();
    const client = new ApiClient("http://fake.test", fake.fetch);

    const health = await client.health();
    expect(health.status).toBe("ok");

    const methods = await client.methods();
    expect(methods.map((entry) => entry.method)).toContain("hierarchical");
    expect(methods).toHaveLength(
      (fixtures.methods.response as { methods: unknown[] }).methods.length,
    );
  });

  it("maps service error documents onto ApiFailure", async () => {
    const client = new ApiClient("http://fake.test", async () => ({
      ok: false,
      status: 422,
      text: async () =>
        JSON.stringify({
          error: { code: "infeasible", message: "cannot build this design", details: {} },
        }),
    }));

    const failure = await client
      .design({ method: "std", samples: 4, differentiate: 4 })
      .then(() => null)
      .catch((err: unknown) => err);
    expect(failure).toBeInstanceOf(ApiFailure);
    expect((failure as ApiFailure).status).toBe(422);
    expect((failure as ApiFailure).code).toBe("infeasible");
    expect((failure as ApiFailure).message).toBe("cannot build this design");
  });

  it("wraps transport failures in ServiceUnreachable", async () => {
    const fake = new FakeService();
    fake.down = true;
    const client = new ApiClient("http://fake.test", fake.fetch);

    const failure = await client
      .health()
      .then(() => null)
      .catch((err: unknown) => err);
    expect(failure).toBeInstanceOf(ServiceUnreachable);
  });
});
