from __future__ import annotations

from movingwell.cli import main

if __name__ == "__main__":
    main()
