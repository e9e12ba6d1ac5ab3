import sys

from kreinrange.cli import main

sys.exit(main())
