"""Stand-in external solver for tests: reads an LP/MPS file with HiGHS, writes `name value` lines."""
import sys

import highspy


def main(model: str, out: str) -> int:
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.readModel(model)
    h.run()
    status = h.getModelStatus()
    with open(out, "w") as fh:
        if status != highspy.HighsModelStatus.kOptimal:
            fh.write(f"status {h.modelStatusToString(status).lower().replace(' ', '_')}\n")
            return 0
        sol = h.getSolution()
        lp = h.getLp()
        for name, v in zip(lp.col_names_, sol.col_value):
            fh.write(f"{name} {v!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
