import sys

from hybridtrade.cli import main

sys.exit(main())
