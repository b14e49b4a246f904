import sys

from kasper.cli import main

sys.exit(main())
