/**
 * Tracks a view's in-flight async handlers so tests can await quiescence.
 *
 * Handlers are not serialized: a newer commit may overtake an older one, and
 * the views guard against stale replies themselves.
 */
export class TaskGroup {
  private readonly running = new Set<Promise<void>>();

  get size(): number {
    return this.running.size;
  }

  run(task: () => Promise<void>): void {
    const entry = task()
      .catch((err) => {
        console.error(err);
      })
      .finally(() => {
        this.running.delete(entry);
      });
    this.running.add(entry);
  }

  async idle(): Promise<void> {
    while (this.running.size > 0) {
      await Promise.all([...this.running]);
    }
  }
}
