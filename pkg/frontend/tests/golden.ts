import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));
export const GOLDEN = join(here, "fixtures", "fock_nge_sweep.csv");
